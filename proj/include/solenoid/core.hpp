#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "solenoid/rational.hpp"

namespace solenoid {

/// Tolerance for compatibility checks on angles that entered through
/// floating point.  Exactly constructed points satisfy compatibility with
/// zero defect.
inline constexpr double kPointTol = 1e-9;

/// The factor sequence N = (n_1, n_2, ...) truncated to a working depth J,
/// with the cumulative products P_j = n_1...n_j kept as exact big integers.
/// Beyond the listed factors the sequence continues cyclically; only the
/// structured series tails ever look past level J.
class SolenoidSpec {
public:
  explicit SolenoidSpec(std::vector<int> factors);

  int levels() const { return static_cast<int>(factors_.size()); }  // J
  const std::vector<int>& factors() const { return factors_; }

  /// n_j for any j >= 1 (cyclic beyond J).
  int factor(int j) const;

  /// P_j for 0 <= j <= J (cached).
  const BigInt& product(int j) const;

  /// P_j for any j >= 0.
  BigInt product_extended(int j) const;

  /// Product over one cycle, i.e. P_J.
  const BigInt& cycle_product() const { return products_.back(); }
  double log_cycle_product() const { return log_cycle_; }

  bool operator==(const SolenoidSpec& other) const { return factors_ == other.factors_; }
  bool operator!=(const SolenoidSpec& other) const { return !(*this == other); }

private:
  std::vector<int> factors_;
  std::vector<BigInt> products_;  // P_0..P_J
  double log_cycle_ = 0.0;
};

using SpecPtr = std::shared_ptr<const SolenoidSpec>;

SpecPtr make_spec(std::vector<int> factors);

/// A frequency r = m / P_level in the dual group, kept in canonical form:
/// either level == 0 or n_level does not divide m; zero is (0, 0).
struct Frequency {
  int level = 0;
  long long m = 0;

  bool is_zero() const { return m == 0; }
  bool operator==(const Frequency& o) const { return level == o.level && m == o.m; }
  bool operator!=(const Frequency& o) const { return !(*this == o); }
};

/// Map order: level-major, then |m|, then sign.  This is also the
/// deterministic summation order used by every evaluator.
struct FrequencyLess {
  bool operator()(const Frequency& a, const Frequency& b) const {
    if (a.level != b.level) return a.level < b.level;
    const unsigned long long am = a.m < 0 ? -static_cast<unsigned long long>(a.m) : a.m;
    const unsigned long long bm = b.m < 0 ? -static_cast<unsigned long long>(b.m) : b.m;
    if (am != bm) return am < bm;
    return a.m < b.m;
  }
};

/// Canonicalizes (level, m); throws if level is outside [0, J].
Frequency make_frequency(const SolenoidSpec& spec, int level, long long m);

/// r as an exact rational m / P_level.
Rational frequency_value(const SolenoidSpec& spec, const Frequency& r);

Frequency negate(const Frequency& r);

/// Exact sum of two frequencies (closed in the dual group); used by the
/// series product.
Frequency add_frequencies(const SolenoidSpec& spec, const Frequency& a, const Frequency& b);

/// A depth-D point of the solenoid stored as compatible angle coordinates
/// t_1..t_D in [0, 1): coordinate j of the point is exp(2*pi*i*t_j) and
/// t_j = n_j * t_{j+1} (mod 1).  Angles are exact rationals, so the group
/// operation and the compatibility invariant are exact.
class SolenoidPoint {
public:
  static SolenoidPoint identity(SpecPtr spec, int depth);
  /// Validates compatibility (within kPointTol, exact for exact input).
  static SolenoidPoint from_angles(SpecPtr spec, std::vector<Rational> angles);
  /// A depth-D point is determined by its deepest angle; shallower angles
  /// follow from compatibility.
  static SolenoidPoint from_deepest_angle(SpecPtr spec, const Rational& deepest, int depth);

  const SpecPtr& spec() const { return spec_; }
  int depth() const { return static_cast<int>(angles_.size()); }
  /// 1-based coordinate index.
  const Rational& angle(int j) const {
    if (j < 1 || j > depth()) throw DomainError("SolenoidPoint::angle: coordinate out of range");
    return angles_[static_cast<size_t>(j - 1)];
  }
  double angle_real(int j) const { return to_double(angle(j)); }

private:
  SolenoidPoint(SpecPtr spec, std::vector<Rational> angles)
      : spec_(std::move(spec)), angles_(std::move(angles)) {}
  friend SolenoidPoint pi_N(const SpecPtr&, const Rational&, int);
  friend SolenoidPoint add(const SolenoidPoint&, const SolenoidPoint&);
  friend SolenoidPoint negate(const SolenoidPoint&);

  SpecPtr spec_;
  std::vector<Rational> angles_;
};

/// The one-parameter subgroup: angles (t, t/n_1, ..., t/P_{depth-1}) mod 1.
/// Requires 1 <= depth <= J + 1.
SolenoidPoint pi_N(const SpecPtr& spec, const Rational& t, int depth);
SolenoidPoint pi_N(const SpecPtr& spec, double t, int depth);

/// Factor-wise group operation (angle-wise addition mod 1).
SolenoidPoint add(const SolenoidPoint& x, const SolenoidPoint& y);
SolenoidPoint negate(const SolenoidPoint& x);

struct Distance {
  double value = 0.0;
  /// Coordinates past the stored depth contribute at most this much:
  /// sum_{j>D} 2^{-j} * 2 = 2^{1-D}.
  double depth_bound = 0.0;
};

/// d(x, y) = sum_{j=1}^{D} 2^{-j} |exp(2 pi i t_j) - exp(2 pi i u_j)|.
Distance metric(const SolenoidPoint& x, const SolenoidPoint& y);

/// Exact character phase in turns: frac(m * t_{level+1}).
Rational character_phase(const Frequency& r, const SolenoidPoint& x);

/// chi_r(x) = (p_{level+1}(x))^m.  Requires x.depth() >= r.level + 1.
std::complex<double> character(const Frequency& r, const SolenoidPoint& x);

}  // namespace solenoid
