#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <stdexcept>
#include <string>

namespace tbp {

// Variable-precision real number. Precision is per-value; freshly constructed
// values pick up the thread-local default, which ScopedPrecision manages.
using BigReal = boost::multiprecision::mpfr_float;

// Working precision for one pipeline stage: decimal digits plus the Taylor
// series order paired with them. The public digit count is decimal; the
// underlying binary precision carries guard digits on top.
struct PrecisionCtx {
    int decimal_digits = 64;
    int taylor_order = 74;

    static constexpr int kGuardDigits = 8;

    PrecisionCtx() = default;

    PrecisionCtx(int digits, int order) : decimal_digits(digits), taylor_order(order)
    {
        if (digits < 16) {
            throw std::invalid_argument("PrecisionCtx: decimal_digits must be >= 16");
        }
        if (order < 4) {
            throw std::invalid_argument("PrecisionCtx: taylor_order must be >= 4");
        }
    }

    // Default pairing: order ~ 1.15 x digits (154/134, 220/192, 264/231).
    static PrecisionCtx for_digits(int digits)
    {
        return PrecisionCtx(digits, static_cast<int>((digits * 115 + 99) / 100));
    }

    int working_digits() const { return decimal_digits + kGuardDigits; }
};

// RAII guard: sets the thread-local default precision for the duration of an
// operation, so temporaries inside it are born at the right precision.
class ScopedPrecision {
public:
    explicit ScopedPrecision(const PrecisionCtx &ctx) : saved_(BigReal::default_precision())
    {
        BigReal::default_precision(static_cast<unsigned>(ctx.working_digits()));
    }
    ScopedPrecision(const ScopedPrecision &) = delete;
    ScopedPrecision &operator=(const ScopedPrecision &) = delete;
    ~ScopedPrecision() { BigReal::default_precision(saved_); }

private:
    unsigned saved_;
};

// Decimal-string serialization in normalized scientific form, mantissa in
// [0.1, 1): "0.29294799125543721e0". Exact round trip at the digit count.
std::string format_decimal(const BigReal &x, int digits);

// Parse a decimal string (either the normalized form above or anything mpfr
// accepts) into a BigReal carrying at least `digits` decimal digits.
BigReal parse_decimal(const std::string &s, int digits);

inline BigReal make_real(const std::string &s, const PrecisionCtx &ctx)
{
    return parse_decimal(s, ctx.working_digits());
}

inline BigReal make_real(long v, const PrecisionCtx &ctx)
{
    return BigReal(v, static_cast<unsigned>(ctx.working_digits()));
}

// 10^e at the context's working precision.
BigReal pow10(long e, const PrecisionCtx &ctx);

} // namespace tbp
