#include "tbp/precision.hpp"

#include <mpfr.h>

#include <cstdlib>

namespace tbp {

std::string format_decimal(const BigReal &x, int digits)
{
    if (digits < 1) {
        throw std::invalid_argument("format_decimal: digits must be positive");
    }
    if (x.is_zero()) {
        return "0.0e0";
    }
    mpfr_exp_t e = 0;
    char *raw = mpfr_get_str(nullptr, &e, 10, static_cast<std::size_t>(digits),
                             x.backend().data(), MPFR_RNDN);
    if (raw == nullptr) {
        throw std::runtime_error("format_decimal: mpfr_get_str failed");
    }
    std::string ds(raw);
    mpfr_free_str(raw);
    bool neg = !ds.empty() && ds[0] == '-';
    if (neg) {
        ds.erase(0, 1);
    }
    // mpfr convention: value = 0.<digits> * 10^e
    return (neg ? "-0." : "0.") + ds + "e" + std::to_string(static_cast<long>(e));
}

BigReal parse_decimal(const std::string &s, int digits)
{
    if (digits < 1) {
        throw std::invalid_argument("parse_decimal: digits must be positive");
    }
    return BigReal(s.c_str(), static_cast<unsigned>(digits));
}

BigReal pow10(long e, const PrecisionCtx &ctx)
{
    BigReal r(0, static_cast<unsigned>(ctx.working_digits()));
    mpfr_ui_pow_ui(r.backend().data(), 10u, static_cast<unsigned long>(e < 0 ? -e : e), MPFR_RNDN);
    if (e < 0) {
        r = 1 / r;
    }
    return r;
}

} // namespace tbp
