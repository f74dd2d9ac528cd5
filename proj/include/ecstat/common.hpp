#pragma once

// Shared scalar and exact-arithmetic types used across the library.

#include <boost/multiprecision/gmp.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ecstat {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

// Exact arbitrary-precision integers and rationals (GMP-backed).  Expression
// templates are disabled: values evaluate eagerly, so auto/lambda returns
// never hold references to dead temporaries.
using Int = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                          boost::multiprecision::et_off>;
using Rat = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                          boost::multiprecision::et_off>;

struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an exact computation would exceed its enumeration budget.
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a local limit fails to certify within the allowed levels.
struct unstabilized_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rationals serialize as "num/den" everywhere ("num" alone when den == 1).
inline std::string rat_to_string(const Rat& q) {
    Int n = numerator(q), d = denominator(q);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

inline Rat rat_from_string(const std::string& s) {
    auto pos = s.find('/');
    if (pos == std::string::npos) return Rat(Int(s));
    return Rat(Int(s.substr(0, pos)), Int(s.substr(pos + 1)));
}

inline double rat_to_double(const Rat& q) { return q.convert_to<double>(); }

}  // namespace ecstat
