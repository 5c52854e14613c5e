#pragma once

#include <stdexcept>
#include <string>

namespace tbp {

// Two bodies closer than the collision cutoff; the trajectory is abandoned.
class collision_error : public std::runtime_error {
public:
    explicit collision_error(double t = 0)
        : std::runtime_error("collision singularity at t ~= " + std::to_string(t)), time_reached(t)
    {
    }
    double time_reached;
};

// Accepted step size fell below the precision floor: effective singularity.
class step_underflow_error : public std::runtime_error {
public:
    explicit step_underflow_error(double t = 0)
        : std::runtime_error("step size underflow at t ~= " + std::to_string(t)), time_reached(t)
    {
    }
    double time_reached;
};

// Degenerate Jacobian detected inside the Householder QR.
class rank_deficient_error : public std::runtime_error {
public:
    rank_deficient_error() : std::runtime_error("rank-deficient least-squares matrix") {}
};

// Double-precision eigensolver failed to converge.
class eigen_no_convergence_error : public std::runtime_error {
public:
    eigen_no_convergence_error() : std::runtime_error("eigenvalue iteration did not converge") {}
};

// Tangential (non-transversal) syzygy crossing; word reading is unreliable.
class degenerate_syzygy_error : public std::runtime_error {
public:
    explicit degenerate_syzygy_error(double t = 0)
        : std::runtime_error("degenerate syzygy at t ~= " + std::to_string(t)), time(t)
    {
    }
    double time;
};

// |E| below cutoff in the scale-invariant period.
class zero_energy_error : public std::runtime_error {
public:
    zero_energy_error() : std::runtime_error("energy too close to zero for T*") {}
};

// Filesystem failure in the catalog / checkpoint store.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string &what) : std::runtime_error(what) {}
};

} // namespace tbp
