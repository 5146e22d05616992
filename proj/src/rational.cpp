#include "solenoid/rational.hpp"

#include <cmath>

namespace solenoid {

Rational rational_of(double x) {
  if (!std::isfinite(x)) throw DomainError("rational_of: non-finite value");
  return Rational(x);
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational frac1(const Rational& q) {
  BigInt n = numerator(q);
  BigInt d = denominator(q);  // > 0, reduced
  BigInt f = n / d;           // truncates toward zero
  if (n < 0 && f * d != n) f -= 1;
  return Rational(n - f * d, d);
}

std::complex<double> unit_phase(const Rational& q) {
  const double theta = 2.0 * M_PI * to_double(frac1(q));
  return {std::cos(theta), std::sin(theta)};
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ParseError("empty rational literal");
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt num(text.substr(0, slash));
      BigInt den(text.substr(slash + 1));
      if (den == 0) throw ParseError("zero denominator in '" + text + "'");
      return Rational(num, den);
    }
    if (text.find('.') != std::string::npos || text.find('e') != std::string::npos ||
        text.find('E') != std::string::npos) {
      return rational_of(std::stod(text));
    }
    return Rational(BigInt(text));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("cannot parse rational '" + text + "'");
  }
}

std::string format_rational(const Rational& q) {
  std::string s = numerator(q).str();
  if (denominator(q) != 1) s += "/" + denominator(q).str();
  return s;
}

}  // namespace solenoid
