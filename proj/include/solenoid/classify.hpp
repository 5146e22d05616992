#pragma once

#include <cstdint>
#include <optional>

#include "solenoid/bohr.hpp"

namespace solenoid {

enum class Verdict { almost_periodic, not_almost_periodic, inconclusive };
enum class Method { analytic_l1, analytic_parseval, numeric_scan };

const char* to_string(Verdict v);
const char* to_string(Method m);

/// Classifier output for one field density lambda = 1/v.
struct APReport {
  Verdict verdict = Verdict::inconclusive;
  Method method = Method::numeric_scan;
  double sup_integral = 0.0;          // max |I(T)| over the scanned probes
  std::map<int, double> crossings;    // n -> first scanned T with |I(T)| > n
  std::optional<double> bound;        // analytic sup bound when almost periodic
};

/// I(T) = integral_0^T (lambda_e - lambda_0) in closed form:
/// sum_{r != 0} lambda_r (e^{2 pi i r T} - 1) / (2 pi i r), the tail
/// truncated where min(T * remainder(L), l1-of-integral past L) < tol.
std::complex<double> integral_value(const BohrSeries& lambda, const Rational& T, double tol,
                                    double* truncation_bound = nullptr);

struct IntegralPoint {
  double T = 0.0;
  std::complex<double> value{0.0, 0.0};
  double truncation_bound = 0.0;
};

std::vector<IntegralPoint> integral_curve(const BohrSeries& lambda,
                                          const std::vector<Rational>& times, double tol = 1e-9);
std::vector<IntegralPoint> integral_curve(const BohrSeries& lambda,
                                          const std::vector<double>& times, double tol = 1e-9);

struct ScanCrossing {
  Rational T;
  double magnitude = 0.0;
};

struct ScanResult {
  double sup_integral = 0.0;
  std::map<int, ScanCrossing> crossings;
};

/// Closed-form |I(T)| over a log grid joined with the level-resonant probe
/// times P_k/3, P_k/4, P_k/2 up to T_max (log grids alone miss the
/// logarithmic growth of the rho perturbations).
ScanResult scan_integral(const BohrSeries& lambda, int n_max, double T_max, double tol = 1e-9);

/// Decision ladder: (1) finite integral-l1 => almost periodic with a sup
/// bound; (2) rho tails => not almost periodic (the formal integral has
/// constant-magnitude coefficients per level, so its Parseval sum diverges);
/// (3) numeric crossings for every n <= n_max => not almost periodic;
/// otherwise inconclusive.  The scan always runs, so the report carries
/// diagnostics either way.
APReport classify(const BohrSeries& lambda, int n_max = 5, double T_max = 1e6);

/// rho_m scaled: the tail sum_{j >= m} (scale / P_j) chi_{1/P_j}, or its
/// real/imaginary part.  Sup norm <= |scale| 2^{1-m}, mean value 0.
BohrSeries make_rho(SpecPtr spec, int m, TailPart part, double scale = 1.0);

/// Deterministic, platform-independent RNG for the experiment harness.
struct SplitMix64 {
  std::uint64_t state = 0;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  long long uniform_int(long long lo, long long hi) {
    return lo + static_cast<long long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

/// Independent RNG stream for sample `index` under a master seed.
SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t index);

struct PerturbResult {
  BohrSeries field;
  APReport report;
  int m = 0;
  TailPart part = TailPart::imaginary_part;
  double d1 = 0.0;   // sampled sup distance to the input
  bool success = false;
  std::optional<APReport> other_report;  // the other candidate, when consulted
};

/// lambda + Im rho_m, then lambda + Re rho_m, with m large enough that the
/// tail sup bound is below epsilon and positivity stays certified; returns
/// the first candidate classified not almost periodic.
PerturbResult perturb_to_generic(const BohrSeries& lambda, double epsilon, int n_max = 3,
                                 double T_max = 1e4);

struct OpennessReport {
  int n = 0;
  double T_n = 0.0;
  double margin = 0.0;  // |I(T_n)| - n
  double radius = 0.0;  // margin / (3 |T_n|)
  int trials = 0;
  int in_un = 0;       // perturbed fields still crossing n at T_n
  int aux_holds = 0;   // d1(lambda-lambda_0, mu-mu_0) <= 2 d1(lambda, mu)
  bool passed = false;
};

/// Samples perturbations mu = lambda + eta with sup|eta| < margin/(3 T_n)
/// and checks that every mu stays in U_n, plus the mean-subtraction
/// inequality on each sample.
OpennessReport un_openness_check(const BohrSeries& lambda, int n, int trials,
                                 std::uint64_t seed = 2026, double T_max = 1e4);

/// Random positive finite field: level-geometric coefficient magnitudes
/// (ratio 1/4), random phases, conjugate-symmetric, constant term shifted so
/// the minimum is at least 1.
BohrSeries random_positive_field(SpecPtr spec, SplitMix64& rng, int max_level = 4);

struct PerturbationOutcome {
  double epsilon = 0.0;
  int m = 0;
  TailPart part = TailPart::imaginary_part;
  double d1 = 0.0;
  bool success = false;
  APReport report;
};

struct SampleResult {
  int index = 0;
  APReport classification;
  std::vector<PerturbationOutcome> perturbations;
};

struct ExperimentConfig {
  int samples = 50;
  std::vector<double> epsilons{1e-3};
  std::uint64_t seed = 0;
  int threads = 1;
  int n_max = 3;
  double T_max = 1e4;
  int max_level = 4;
};

struct ExperimentSummary {
  ExperimentConfig config;
  std::vector<SampleResult> results;  // index order
};

/// Density experiment: classify random positive finite fields (expected
/// almost periodic) and their epsilon-perturbations (expected not).  Samples
/// run independently on derived RNG streams and are reduced in index order,
/// so the summary does not depend on the thread count.
ExperimentSummary genericity_experiment(SpecPtr spec, const ExperimentConfig& config);

}  // namespace solenoid
