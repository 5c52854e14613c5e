#pragma once

#include "tbp/model.hpp"
#include "tbp/precision.hpp"

#include <string>
#include <vector>

namespace tbp {

// One collinearity instant: time, the body between the other two (1-based),
// and the sign of dA/dt at the crossing (A = oriented triangle area).
struct Syzygy {
    BigReal t;
    int middle = 0;
    int sign = 0;
};

// Word over {a, A, b, B} (A = a^-1, B = b^-1). `canonical()` is the cyclically
// reduced, lexicographically minimal rotation under a < A < b < B.
struct FreeWord {
    std::string letters;

    FreeWord() = default;
    explicit FreeWord(std::string raw) : letters(std::move(raw)) {}

    bool empty() const { return letters.empty(); }
};

std::string free_reduce(const std::string &w);
std::string cyclic_reduce(const std::string &w);
FreeWord canonical_word(const std::string &raw);

// All syzygies in (0, T]: sign changes of the oriented area over the step
// trace, bisected on the dense output to time tolerance 1e-20. The boundary
// crossing at t = T (the initial collinear configuration) is included once.
// Throws degenerate_syzygy_error on a tangential crossing.
std::vector<Syzygy> syzygy_sequence(const SearchPoint &p, const PrecisionCtx &ctx);

// Map the syzygy sequence to a free-group word: generator letters for
// middle-body crossings, the third letter eliminated through the
// thrice-punctured-sphere relation, then free + cyclic reduction. The letter
// table is calibrated so the figure-eight orbit reads abAB.
FreeWord word_from_syzygies(const std::vector<Syzygy> &seq);

// Largest k with w = (abAB)^k as a cyclic word, else 0.
int satellite_power(const FreeWord &w);

// T* = T |E|^(3/2), E = -2.5 + 3(vx^2 + vy^2). Throws zero_energy_error when
// |E| < 1e-10.
BigReal scale_invariant_period(const BigReal &vx, const BigReal &vy, const BigReal &T,
                               const PrecisionCtx &ctx);

// True iff some nontrivial cyclic body permutation satisfies
// r_i(t + T/3) = r_sigma(i)(t) (positions and velocities) at 64 sample times,
// within 10^(-digits/2).
bool is_choreography(const SearchPoint &p, const PrecisionCtx &ctx);

} // namespace tbp
