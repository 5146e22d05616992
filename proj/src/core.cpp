#include "solenoid/core.hpp"

#include <cmath>
#include <limits>

namespace solenoid {

SolenoidSpec::SolenoidSpec(std::vector<int> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw DomainError("SolenoidSpec: factor list must be non-empty");
  products_.reserve(factors_.size() + 1);
  products_.emplace_back(1);
  for (int n : factors_) {
    if (n < 2) throw DomainError("SolenoidSpec: every factor must be >= 2");
    products_.push_back(products_.back() * n);
    log_cycle_ += std::log(static_cast<double>(n));
  }
}

int SolenoidSpec::factor(int j) const {
  if (j < 1) throw DomainError("SolenoidSpec::factor: index must be >= 1");
  return factors_[static_cast<size_t>((j - 1) % levels())];
}

const BigInt& SolenoidSpec::product(int j) const {
  if (j < 0 || j > levels()) throw DomainError("SolenoidSpec::product: level out of range");
  return products_[static_cast<size_t>(j)];
}

BigInt SolenoidSpec::product_extended(int j) const {
  if (j < 0) throw DomainError("SolenoidSpec::product_extended: negative level");
  if (j <= levels()) return products_[static_cast<size_t>(j)];
  BigInt p = products_.back();
  for (int i = levels() + 1; i <= j; ++i) p *= factor(i);
  return p;
}

SpecPtr make_spec(std::vector<int> factors) {
  return std::make_shared<const SolenoidSpec>(std::move(factors));
}

Frequency make_frequency(const SolenoidSpec& spec, int level, long long m) {
  if (level < 0 || level > spec.levels())
    throw DomainError("Frequency: level outside [0, J]");
  if (m == 0) return {0, 0};
  while (level > 0 && m % spec.factor(level) == 0) {
    m /= spec.factor(level);
    --level;
  }
  return {level, m};
}

Rational frequency_value(const SolenoidSpec& spec, const Frequency& r) {
  return Rational(BigInt(r.m), spec.product(r.level));
}

Frequency negate(const Frequency& r) { return {r.level, -r.m}; }

Frequency add_frequencies(const SolenoidSpec& spec, const Frequency& a, const Frequency& b) {
  const int level = std::max(a.level, b.level);
  // m = a.m * (P_level / P_{a.level}) + b.m * (P_level / P_{b.level})
  __int128 scale_a = 1, scale_b = 1;
  for (int j = a.level + 1; j <= level; ++j) scale_a *= spec.factor(j);
  for (int j = b.level + 1; j <= level; ++j) scale_b *= spec.factor(j);
  const __int128 m = static_cast<__int128>(a.m) * scale_a + static_cast<__int128>(b.m) * scale_b;
  if (m > std::numeric_limits<long long>::max() || m < std::numeric_limits<long long>::min())
    throw DomainError("add_frequencies: numerator overflow");
  return make_frequency(spec, level, static_cast<long long>(m));
}

namespace {

void check_depth(const SolenoidSpec& spec, int depth) {
  if (depth < 1 || depth > spec.levels() + 1)
    throw DomainError("point depth must be in [1, J+1]");
}

// Circular distance of two angles in turns, as a rational in [0, 1/2].
Rational circular_gap(const Rational& a, const Rational& b) {
  Rational d = frac1(a - b);
  if (2 * d > 1) d = 1 - d;
  return d;
}

}  // namespace

SolenoidPoint SolenoidPoint::identity(SpecPtr spec, int depth) {
  check_depth(*spec, depth);
  return SolenoidPoint(std::move(spec), std::vector<Rational>(static_cast<size_t>(depth), Rational(0)));
}

SolenoidPoint SolenoidPoint::from_angles(SpecPtr spec, std::vector<Rational> angles) {
  check_depth(*spec, static_cast<int>(angles.size()));
  const Rational tol = rational_of(kPointTol);
  for (auto& a : angles) a = frac1(a);
  for (size_t j = 0; j + 1 < angles.size(); ++j) {
    const Rational expected = frac1(spec->factor(static_cast<int>(j) + 1) * angles[j + 1]);
    if (circular_gap(angles[j], expected) > tol)
      throw DomainError("SolenoidPoint: angles violate compatibility t_j = n_j t_{j+1} (mod 1)");
  }
  return SolenoidPoint(std::move(spec), std::move(angles));
}

SolenoidPoint SolenoidPoint::from_deepest_angle(SpecPtr spec, const Rational& deepest, int depth) {
  check_depth(*spec, depth);
  std::vector<Rational> angles(static_cast<size_t>(depth));
  angles.back() = frac1(deepest);
  for (int j = depth - 1; j >= 1; --j)
    angles[static_cast<size_t>(j - 1)] = frac1(spec->factor(j) * angles[static_cast<size_t>(j)]);
  return SolenoidPoint(std::move(spec), std::move(angles));
}

SolenoidPoint pi_N(const SpecPtr& spec, const Rational& t, int depth) {
  check_depth(*spec, depth);
  std::vector<Rational> angles;
  angles.reserve(static_cast<size_t>(depth));
  for (int j = 0; j < depth; ++j)
    angles.push_back(frac1(Rational(numerator(t), denominator(t) * spec->product(j))));
  return SolenoidPoint(spec, std::move(angles));
}

SolenoidPoint pi_N(const SpecPtr& spec, double t, int depth) {
  return pi_N(spec, rational_of(t), depth);
}

SolenoidPoint add(const SolenoidPoint& x, const SolenoidPoint& y) {
  if (x.depth() != y.depth()) throw DomainError("add: point depth mismatch");
  if (*x.spec() != *y.spec()) throw DomainError("add: points live on different solenoids");
  std::vector<Rational> angles;
  angles.reserve(x.angles_.size());
  for (size_t j = 0; j < x.angles_.size(); ++j) angles.push_back(frac1(x.angles_[j] + y.angles_[j]));
  return SolenoidPoint(x.spec_, std::move(angles));
}

SolenoidPoint negate(const SolenoidPoint& x) {
  std::vector<Rational> angles;
  angles.reserve(x.angles_.size());
  for (const auto& a : x.angles_) angles.push_back(frac1(-a));
  return SolenoidPoint(x.spec_, std::move(angles));
}

Distance metric(const SolenoidPoint& x, const SolenoidPoint& y) {
  if (x.depth() != y.depth()) throw DomainError("metric: point depth mismatch");
  double sum = 0.0;
  double weight = 0.5;
  for (int j = 1; j <= x.depth(); ++j, weight *= 0.5) {
    // |exp(2 pi i a) - exp(2 pi i b)| = 2 sin(pi * gap)
    const double gap = to_double(frac1(x.angle(j) - y.angle(j)));
    const double chord = 2.0 * std::abs(std::sin(M_PI * gap));
    sum += weight * chord;
  }
  return {sum, std::ldexp(1.0, 1 - x.depth())};
}

Rational character_phase(const Frequency& r, const SolenoidPoint& x) {
  if (x.depth() < r.level + 1)
    throw DomainError("character: point depth " + std::to_string(x.depth()) +
                      " insufficient for frequency level " + std::to_string(r.level));
  return frac1(r.m * x.angle(r.level + 1));
}

std::complex<double> character(const Frequency& r, const SolenoidPoint& x) {
  if (r.is_zero()) {
    if (x.depth() < 1) throw DomainError("character: empty point");
    return {1.0, 0.0};
  }
  return unit_phase(character_phase(r, x));
}

}  // namespace solenoid
