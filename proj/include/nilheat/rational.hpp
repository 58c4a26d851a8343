#ifndef NILHEAT_RATIONAL_HPP
#define NILHEAT_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace nilheat {

// Exact arbitrary-precision rational scalar. Everything symbolic in this
// library (polynomial coefficients, bracket evaluations, chart series) is
// computed over this type; doubles appear only in the numeric rank mode and
// in the Monte-Carlo kernels.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

// q^e for integer e of either sign; negative exponents require q != 0.
Rational rat_pow(const Rational& q, long e);

Rational rat_factorial(unsigned n);

// Canonical text form: "p" for integers, "p/q" otherwise (q > 0).
std::string rat_str(const Rational& r);

}  // namespace nilheat

#endif
