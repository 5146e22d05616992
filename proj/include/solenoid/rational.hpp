#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <string>

#include "solenoid/errors.hpp"

namespace solenoid {

// Exact arithmetic backbone.  Frequencies, grid points and angle coordinates
// are kept as rationals; floating point enters only at transcendental
// evaluation (exp/sin/cos).  Doubles are dyadic rationals, so the conversion
// double -> Rational is exact.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact conversion; throws DomainError for non-finite input.
Rational rational_of(double x);

double to_double(const Rational& q);

/// q - floor(q), in [0, 1).
Rational frac1(const Rational& q);

/// exp(2*pi*i*q), with the argument reduced mod 1 exactly before any
/// floating-point operation.  This is the single place where character and
/// series phases leave exact arithmetic.
std::complex<double> unit_phase(const Rational& q);

/// Accepts "p/q", an integer, or a decimal/scientific literal (converted
/// exactly from its double value).
Rational parse_rational(const std::string& text);

/// "p/q", or just "p" when the denominator is 1.
std::string format_rational(const Rational& q);

}  // namespace solenoid
