#pragma once

#include <complex>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "solenoid/core.hpp"

namespace solenoid {

enum class TailPart { full, real_part, imaginary_part };

/// Structured infinite tail: one base frequency 1/P_j per level j >=
/// start_level, with coefficient scale * ratio^(j-start) / P_j^power.  The
/// classic cases are
///   rho tails        (ratio = 1, power = 1): coefficient scale / P_j,
///   geometric tails  (power = 0, ratio < 1): coefficient scale * ratio^(j-s).
/// part selects the full complex term or its real/imaginary part (which adds
/// the conjugate term at -1/P_j, keeping real-valued series symmetric).
/// Derivatives shift power up, formal integrals shift it down; the p = 0,
/// ratio = 1 case (integral of a rho tail) is no longer absolutely summable
/// and only finite truncations of it can be evaluated.
struct TailSpec {
  int start_level = 1;
  std::complex<double> scale{0.0, 0.0};
  double ratio = 1.0;
  int power = 1;
  TailPart part = TailPart::full;

  static TailSpec rho(int start_level, std::complex<double> scale, TailPart part);
  static TailSpec geometric(int start_level, std::complex<double> base, double ratio,
                            TailPart part = TailPart::full);

  bool same_shape(const TailSpec& o) const {
    return start_level == o.start_level && ratio == o.ratio && power == o.power && part == o.part;
  }
};

struct TailSum {
  double value = 0.0;
  bool finite = true;
};

/// sum_{j >= from_level} |scale| * ratio^(j-start) / P_j^(power+extra_power),
/// evaluated in closed form from the per-cycle ratio (exact because the
/// factor list extends cyclically).  finite == false means the sum diverges
/// (boundary cases count as divergent).
TailSum tail_weighted_sum(const SolenoidSpec& spec, const TailSpec& tail, int from_level,
                          int extra_power);

/// Sup-norm bound on everything past `level`; +inf when not summable.
/// For rho tails this is <= |scale| * 2^-level; for geometric tails it is
/// |scale| * ratio^(level+1-start) / (1 - ratio).
double tail_remainder_after(const SolenoidSpec& spec, const TailSpec& tail, int level);

bool tail_summable(const SolenoidSpec& spec, const TailSpec& tail);

/// Smallest truncation level L with remainder < tol; throws DomainError for
/// divergent tails.
int tail_truncation_level(const SolenoidSpec& spec, const TailSpec& tail, double tol);

/// A sparse Fourier series over the dual group: a finite frequency ->
/// coefficient map plus an optional structured tail.  Values are immutable
/// once built; the mutating setters are the construction API.
class BohrSeries {
public:
  using CoeffMap = std::map<Frequency, std::complex<double>, FrequencyLess>;

  explicit BohrSeries(SpecPtr spec, bool real_valued = true);
  static BohrSeries constant(SpecPtr spec, std::complex<double> c);

  const SpecPtr& spec() const { return spec_; }
  bool real_valued() const { return real_; }
  void set_real_valued(bool r) { real_ = r; }
  const CoeffMap& coefficients() const { return coeffs_; }
  const std::optional<TailSpec>& tail() const { return tail_; }
  bool finite() const { return !tail_.has_value(); }
  bool divergent_tail() const;

  std::complex<double> coefficient(const Frequency& r) const;
  std::complex<double> coefficient(int level, long long m) const;

  /// Canonicalizes (level, m); exact zeros erase the entry.
  void set_coefficient(int level, long long m, std::complex<double> c);
  void merge_coefficient(int level, long long m, std::complex<double> c);
  /// c at +r and conj(c) at -r.
  void set_pair(int level, long long m, std::complex<double> c);
  void set_tail(std::optional<TailSpec> tail);

  int max_level() const;
  /// sum of |c_r| over r != 0 in the finite part.
  double finite_l1() const;
  /// Largest |m| * P_level / P_(r.level) over the finite part (harmonic
  /// index once every frequency is written over the common denominator
  /// P_level), clamped to 2^30.
  long long max_harmonic_index(int level) const;

  /// Verifies the conjugate-symmetry invariant of real-valued series.
  void check_real_invariant(double tol = 1e-12) const;

private:
  SpecPtr spec_;
  bool real_ = true;
  CoeffMap coeffs_;
  std::optional<TailSpec> tail_;
};

struct SeriesTerm {
  Rational freq;  // exact frequency value
  std::complex<double> coeff;
  int level = 0;
  long long m = 0;  // freq = m / P_level
};

struct TermList {
  std::vector<SeriesTerm> terms;
  double tail_bound = 0.0;  // sup bound of the dropped tail remainder
};

/// Finite part plus the tail expanded until its remainder drops below tol
/// (levels capped at max_tail_level; throws DomainError when the cap
/// prevents reaching tol or the tail diverges).
TermList term_list(const BohrSeries& f, double tol, int max_tail_level = 1 << 30);

struct EvalResult {
  std::complex<double> value{0.0, 0.0};
  double tail_bound = 0.0;
};

/// f_e(t) = sum f_r exp(2 pi i r t); the exact-rational overload reduces
/// every phase mod 1 exactly.
EvalResult evaluate_at_time(const BohrSeries& f, const Rational& t, double tol = 1e-12);
EvalResult evaluate_at_time(const BohrSeries& f, double t, double tol = 1e-12);

/// sum f_r chi_r(x); needs x.depth() > truncation level of the tail.
EvalResult evaluate_at_point(const BohrSeries& f, const SolenoidPoint& x, double tol = 1e-12);

/// The Bohr mean M{f}: the coefficient at frequency zero.
std::complex<double> mean_value(const BohrSeries& f);

BohrSeries add(const BohrSeries& f, const BohrSeries& g);
BohrSeries subtract(const BohrSeries& f, const BohrSeries& g);
BohrSeries scale(const BohrSeries& f, std::complex<double> k);

/// Convolution product; defined for finite series only.
BohrSeries multiply(const BohrSeries& f, const BohrSeries& g);

/// Coefficient map r -> 2 pi i r f_r.  Tails shift power up by one.
BohrSeries derivative(const BohrSeries& f);

/// Coefficient map r -> f_r / (2 pi i r), F_0 = 0; requires zero mean.
/// Integrating a rho tail yields constant-magnitude coefficients; the result
/// carries a divergent tail and only finite truncations of it evaluate.
BohrSeries formal_integral(const BohrSeries& f);

/// Keeps levels <= j, expanding the tail through level j; the result is
/// purely periodic with period P_j.
BohrSeries partial_sum(const BohrSeries& f, int j);

/// f on the grid t0 + k dt, k = 0..count-1, via per-term phase recurrences
/// (re-anchored to exact phases periodically).
std::vector<std::complex<double>> sample_uniform(const BohrSeries& f, const Rational& t0,
                                                 const Rational& dt, int count,
                                                 double tol = 1e-12);

struct ReciprocalResult {
  BohrSeries series;
  double reconstruction_error = 0.0;  // max sampled |lambda_e * v_e - 1|
  int grid = 0;
};

/// Level-j Fourier expansion of 1/v_e by oversampled projection onto the
/// harmonics m/P_j; v must certify positive.  Coefficients below tol are
/// discarded; reconstruction error above 100*tol raises ToleranceError.
ReciprocalResult reciprocal(const BohrSeries& v, int level, double tol = 1e-12);

struct PositivityCertificate {
  double min_bound = 0.0;  // min_sample - lipschitz*step/2 - tail sup
  bool certified = false;
  double min_sample = 0.0;
  double lipschitz = 0.0;  // sum 2 pi |r| |v_r| over finite part and tail
  double step = 0.0;
};

/// Samples the finite part over one period P_j and discounts the Lipschitz
/// slack between samples plus the whole-tail sup bound.  An uncertified
/// result is a valid answer, not an error.
PositivityCertificate positivity_certificate(const BohrSeries& v, int level);

/// max over sampled (t, delta) of |f_e(t+delta) - f_e(t)| / delta^alpha,
/// delta log-spaced in [1e-6, 1]; a lower bound for the Hoelder constant.
double holder_estimate(const BohrSeries& f, double alpha, int trials);

/// Sampled sup norm of f - g over one period (a lower bound).  When the
/// difference is finite the grid oversamples past the Nyquist index, so the
/// grid mean equals the true mean exactly.
double d1_distance(const BohrSeries& f, const BohrSeries& g);

/// [v^1, ..., v^k] with v^(j+1) = derivative(v^j) * v (derivatives along the
/// flow direction); finite series only.
std::vector<BohrSeries> jet_sequence(const BohrSeries& v, int k);

/// d_k(v, w) = sum_{j<=k} max |v^j - w^j| over a sampled period.
double dk_distance(const BohrSeries& v, const BohrSeries& w, int k);

/// d_inf = sum_r 2^-r d_r / (1 + d_r), truncated after `terms` summands
/// (remainder < 2^-terms); always < 1.
double dinf_distance(const BohrSeries& v, const BohrSeries& w, int terms = 16);

}  // namespace solenoid
