#include "solenoid/classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace solenoid {

namespace {

constexpr std::complex<double> kTwoPiI{0.0, 2.0 * M_PI};
constexpr double kInf = std::numeric_limits<double>::infinity();

// l1 norm of the formal-integral tail past `level`, i.e.
// sum_{j > level} |coeff_j| P_j / (2 pi); +inf when divergent.
double integral_tail_l1_after(const SolenoidSpec& spec, const TailSpec& tail, int level) {
  const TailSum s = tail_weighted_sum(spec, tail, level + 1, -1);
  return s.finite ? s.value / (2.0 * M_PI) : kInf;
}

// Truncation bound for I(T) past `level`.
double integral_tail_bound(const SolenoidSpec& spec, const TailSpec& tail, int level, double Td) {
  const double by_time = Td * tail_remainder_after(spec, tail, level);
  const double by_l1 = 2.0 * integral_tail_l1_after(spec, tail, level);
  return std::min(by_time, by_l1);
}

// Scale parts of the (up to two) terms a tail contributes per level,
// excluding the shared ratio^(j-s)/P_j^power gain.
struct PartScales {
  std::complex<double> plus{0.0, 0.0};
  std::complex<double> minus{0.0, 0.0};
  bool has_minus = false;
};

PartScales part_scales(const TailSpec& tail) {
  PartScales out;
  switch (tail.part) {
    case TailPart::full:
      out.plus = tail.scale;
      break;
    case TailPart::real_part:
      out.plus = 0.5 * tail.scale;
      out.minus = std::conj(out.plus);
      out.has_minus = true;
      break;
    case TailPart::imaginary_part:
      out.plus = tail.scale * std::complex<double>(0.0, -0.5);  // scale/(2i)
      out.minus = std::conj(out.plus);
      out.has_minus = true;
      break;
  }
  return out;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::almost_periodic: return "almost_periodic";
    case Verdict::not_almost_periodic: return "not_almost_periodic";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(Method m) {
  switch (m) {
    case Method::analytic_l1: return "analytic_l1";
    case Method::analytic_parseval: return "analytic_parseval";
    case Method::numeric_scan: return "numeric_scan";
  }
  return "?";
}

std::complex<double> integral_value(const BohrSeries& lambda, const Rational& T, double tol,
                                    double* truncation_bound) {
  const SolenoidSpec& spec = *lambda.spec();
  std::complex<double> sum{0.0, 0.0};
  for (const auto& [r, c] : lambda.coefficients()) {
    if (r.is_zero()) continue;
    const Rational rv = frequency_value(spec, r);
    const std::complex<double> ph = unit_phase(rv * T);
    sum += c * (ph - 1.0) / (kTwoPiI * to_double(rv));
  }
  double bound = 0.0;
  if (lambda.tail()) {
    const TailSpec& tail = *lambda.tail();
    const double Td = std::abs(to_double(T));
    int level = tail.start_level - 1;
    while ((bound = integral_tail_bound(spec, tail, level, Td)) >= tol) {
      if (!std::isfinite(bound) && !tail_summable(spec, tail))
        throw DomainError("integral_value: tail admits no finite truncation bound");
      ++level;
      if (level > tail.start_level + 500000)
        throw DomainError("integral_value: truncation level exceeds sanity cap");
    }
    const PartScales parts = part_scales(tail);
    // coeff * P_j / (2 pi i (+-1)) stays O(scale): track
    // gain1 = ratio^(j-s) * P_j^(1-power) multiplicatively.
    BigInt product = spec.product_extended(tail.start_level);
    double gain1 = std::pow(to_double(product), 1 - tail.power);
    for (int j = tail.start_level; j <= level; ++j) {
      const std::complex<double> ph = unit_phase(Rational(numerator(T), denominator(T) * product));
      sum += parts.plus * gain1 * (ph - 1.0) / kTwoPiI;
      if (parts.has_minus) sum -= parts.minus * gain1 * (std::conj(ph) - 1.0) / kTwoPiI;
      product *= spec.factor(j + 1);
      gain1 *= tail.ratio * std::pow(static_cast<double>(spec.factor(j + 1)), 1 - tail.power);
    }
  }
  if (truncation_bound) *truncation_bound = bound;
  return sum;
}

std::vector<IntegralPoint> integral_curve(const BohrSeries& lambda,
                                          const std::vector<Rational>& times, double tol) {
  if (!lambda.real_valued()) throw DomainError("integral_curve: lambda must be real-valued");
  std::vector<IntegralPoint> out;
  out.reserve(times.size());
  for (const Rational& T : times) {
    IntegralPoint p;
    p.T = to_double(T);
    p.value = integral_value(lambda, T, tol, &p.truncation_bound);
    out.push_back(p);
  }
  return out;
}

std::vector<IntegralPoint> integral_curve(const BohrSeries& lambda,
                                          const std::vector<double>& times, double tol) {
  std::vector<Rational> exact;
  exact.reserve(times.size());
  for (double t : times) exact.push_back(rational_of(t));
  return integral_curve(lambda, exact, tol);
}

ScanResult scan_integral(const BohrSeries& lambda, int n_max, double T_max, double tol) {
  if (n_max < 1) throw DomainError("scan_integral: n_max must be >= 1");
  if (!(T_max >= 1.0)) throw DomainError("scan_integral: T_max must be >= 1");
  const SolenoidSpec& spec = *lambda.spec();
  const Rational t_cap = rational_of(T_max);

  std::vector<Rational> probes;
  for (int e = 0;; ++e) {
    const double T = std::pow(10.0, e / 8.0);
    if (T > T_max) break;
    probes.push_back(rational_of(T));
  }
  for (int k = 1; k < 4000; ++k) {
    const BigInt P = spec.product_extended(k);
    if (Rational(P, 4) > t_cap) break;
    for (int c : {2, 3, 4}) {
      const Rational q(P, c);
      if (q <= t_cap) probes.push_back(q);
    }
  }
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  ScanResult res;
  for (const Rational& T : probes) {
    const double mag = std::abs(integral_value(lambda, T, tol));
    res.sup_integral = std::max(res.sup_integral, mag);
    for (int n = 1; n <= n_max; ++n)
      if (mag > n && !res.crossings.count(n)) res.crossings.emplace(n, ScanCrossing{T, mag});
  }
  return res;
}

APReport classify(const BohrSeries& lambda, int n_max, double T_max) {
  if (!lambda.real_valued()) throw DomainError("classify: lambda must be real-valued");
  const SolenoidSpec& spec = *lambda.spec();
  const ScanResult scan = scan_integral(lambda, n_max, T_max);

  APReport rep;
  rep.sup_integral = scan.sup_integral;
  for (const auto& [n, c] : scan.crossings) rep.crossings.emplace(n, to_double(c.T));

  // (1) absolutely convergent formal integral; the reported bound uses
  // |e^{i theta} - 1| <= 2 so that sup |I(T)| <= bound holds.
  double l1 = 0.0;
  for (const auto& [r, c] : lambda.coefficients())
    if (!r.is_zero()) l1 += std::abs(c) / (M_PI * std::abs(to_double(frequency_value(spec, r))));
  bool l1_finite = true;
  if (lambda.tail()) {
    const double tail_l1 = integral_tail_l1_after(spec, *lambda.tail(),
                                                  lambda.tail()->start_level - 1);
    l1_finite = std::isfinite(tail_l1);
    l1 += 2.0 * tail_l1;
  }
  if (l1_finite) {
    rep.verdict = Verdict::almost_periodic;
    rep.method = Method::analytic_l1;
    rep.bound = l1;
    return rep;
  }

  // (2) rho tails: the formal integral has one coefficient of constant
  // magnitude |scale|/(2 pi) per level, so its Parseval sum cannot be
  // finite.  Geometric tails past the l1 class fall through to the scan.
  const TailSpec& tail = *lambda.tail();
  if (tail.ratio == 1.0 && tail.power == 1 && std::abs(tail.scale) > 0.0) {
    rep.verdict = Verdict::not_almost_periodic;
    rep.method = Method::analytic_parseval;
    return rep;
  }

  // (3) numeric evidence: a crossing for every requested n.
  bool all = true;
  for (int n = 1; n <= n_max; ++n) all = all && scan.crossings.count(n) > 0;
  rep.method = Method::numeric_scan;
  rep.verdict = all ? Verdict::not_almost_periodic : Verdict::inconclusive;
  return rep;
}

BohrSeries make_rho(SpecPtr spec, int m, TailPart part, double scale) {
  if (m < 1) throw DomainError("make_rho: start level must be >= 1");
  BohrSeries out(std::move(spec), part != TailPart::full);
  out.set_tail(TailSpec::rho(m, {scale, 0.0}, part));
  return out;
}

SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 boot(seed + 0x9E3779B97F4A7C15ull * (index + 1));
  return SplitMix64(boot.next());
}

namespace {

// Random real trig polynomial with l1 norm strictly below `radius`.
BohrSeries random_small_field(const SpecPtr& spec, SplitMix64& rng, double radius) {
  BohrSeries eta(spec, true);
  const int levels = std::min(4, spec->levels());
  const int harmonics = 1 + static_cast<int>(rng.next() % 3);
  std::vector<double> amps(static_cast<size_t>(harmonics));
  double total = 0.0;
  for (auto& a : amps) {
    a = rng.uniform(0.1, 1.0);
    total += 2.0 * a;
  }
  const double budget = radius * rng.uniform(0.05, 0.95);
  for (int i = 0; i < harmonics; ++i) {
    const int level = static_cast<int>(rng.uniform_int(0, levels));
    long long m;
    if (level == 0) {
      m = rng.uniform_int(1, 3);
    } else {
      const int n = spec->factor(level);
      m = rng.uniform_int(1, 3 * n);
      if (m % n == 0) m += 1;
    }
    const double mag = amps[static_cast<size_t>(i)] * budget / total;
    eta.set_pair(level, m, std::polar(mag / 2.0, 2.0 * M_PI * rng.uniform()));
  }
  return eta;
}

}  // namespace

PerturbResult perturb_to_generic(const BohrSeries& lambda, double epsilon, int n_max,
                                 double T_max) {
  if (!(epsilon > 0.0)) throw DomainError("perturb_to_generic: epsilon must be positive");
  if (!lambda.real_valued()) throw DomainError("perturb_to_generic: field must be real-valued");
  const PositivityCertificate base = positivity_certificate(lambda, lambda.max_level());
  if (!base.certified)
    throw DomainError("perturb_to_generic: input field positivity is not certified");

  int m = 1;
  while (std::ldexp(1.0, 1 - m) >= epsilon) ++m;
  // Escalate until the perturbed fields stay positivity-certified; the tail
  // sup bound 2^(1-m) only shrinks.
  std::optional<BohrSeries> cand_im, cand_re;
  for (;; ++m) {
    if (m > 2100) throw DomainError("perturb_to_generic: positivity never certified");
    BohrSeries ci = add(lambda, make_rho(lambda.spec(), m, TailPart::imaginary_part, 1.0));
    BohrSeries cr = add(lambda, make_rho(lambda.spec(), m, TailPart::real_part, 1.0));
    if (positivity_certificate(ci, lambda.max_level()).certified &&
        positivity_certificate(cr, lambda.max_level()).certified) {
      cand_im = std::move(ci);
      cand_re = std::move(cr);
      break;
    }
  }

  APReport rep_im = classify(*cand_im, n_max, T_max);
  if (rep_im.verdict == Verdict::not_almost_periodic) {
    return {*cand_im, rep_im, m, TailPart::imaginary_part, d1_distance(*cand_im, lambda), true,
            std::nullopt};
  }
  APReport rep_re = classify(*cand_re, n_max, T_max);
  if (rep_re.verdict == Verdict::not_almost_periodic) {
    return {*cand_re, rep_re, m, TailPart::real_part, d1_distance(*cand_re, lambda), true,
            std::move(rep_im)};
  }
  return {*cand_im, std::move(rep_im), m, TailPart::imaginary_part,
          d1_distance(*cand_im, lambda), false, std::move(rep_re)};
}

OpennessReport un_openness_check(const BohrSeries& lambda, int n, int trials, std::uint64_t seed,
                                 double T_max) {
  if (n < 1) throw DomainError("un_openness_check: n must be >= 1");
  if (trials < 1) throw DomainError("un_openness_check: need at least one trial");
  const ScanResult scan = scan_integral(lambda, n, T_max);
  const auto hit = scan.crossings.find(n);
  if (hit == scan.crossings.end())
    throw DomainError("un_openness_check: no crossing T_n found below T_max");
  const Rational T_n = hit->second.T;
  const double margin = hit->second.magnitude - n;
  const double radius = margin / (3.0 * to_double(T_n));
  const double lambda0 = mean_value(lambda).real();

  OpennessReport rep;
  rep.n = n;
  rep.T_n = to_double(T_n);
  rep.margin = margin;
  rep.radius = radius;
  rep.trials = trials;

  SplitMix64 rng(seed);
  const BohrSeries centered = subtract(lambda, BohrSeries::constant(lambda.spec(), lambda0));
  for (int trial = 0; trial < trials; ++trial) {
    const BohrSeries eta = random_small_field(lambda.spec(), rng, radius);
    const BohrSeries mu = add(lambda, eta);
    if (std::abs(integral_value(mu, T_n, 1e-9)) > n) ++rep.in_un;
    const double mu0 = mean_value(mu).real();
    const double lhs =
        d1_distance(centered, subtract(mu, BohrSeries::constant(lambda.spec(), mu0)));
    const double rhs = d1_distance(lambda, mu);
    if (lhs <= 2.0 * rhs + 1e-12 * (1.0 + rhs)) ++rep.aux_holds;
  }
  rep.passed = rep.in_un == trials && rep.aux_holds == trials;
  return rep;
}

BohrSeries random_positive_field(SpecPtr spec, SplitMix64& rng, int max_level) {
  BohrSeries v(spec, true);
  const int top = std::min(max_level, spec->levels());
  for (int level = 0; level <= top; ++level) {
    const int count = 1 + static_cast<int>(rng.next() % 2);
    for (int i = 0; i < count; ++i) {
      long long m;
      if (level == 0) {
        m = rng.uniform_int(1, 3);
      } else {
        const int n = spec->factor(level);
        m = rng.uniform_int(1, 3 * n);
        if (m % n == 0) m += 1;
      }
      const double mag = 0.3 * std::pow(0.25, level) * rng.uniform(0.5, 1.0);
      v.set_pair(level, m, std::polar(mag, 2.0 * M_PI * rng.uniform()));
    }
  }
  v.set_coefficient(0, 0, 1.0 + v.finite_l1());  // min over the solenoid >= 1
  return v;
}

ExperimentSummary genericity_experiment(SpecPtr spec, const ExperimentConfig& config) {
  if (config.samples < 1) throw DomainError("genericity_experiment: samples must be >= 1");
  ExperimentSummary summary;
  summary.config = config;
  summary.results.resize(static_cast<size_t>(config.samples));

  std::atomic<int> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const int i = cursor.fetch_add(1);
      if (i >= config.samples) return;
      SplitMix64 rng = derive_stream(config.seed, static_cast<std::uint64_t>(i));
      const BohrSeries field = random_positive_field(spec, rng, config.max_level);
      SampleResult sample;
      sample.index = i;
      sample.classification = classify(field, config.n_max, config.T_max);
      for (double eps : config.epsilons) {
        PerturbResult p = perturb_to_generic(field, eps, config.n_max, config.T_max);
        sample.perturbations.push_back({eps, p.m, p.part, p.d1, p.success, std::move(p.report)});
      }
      summary.results[static_cast<size_t>(i)] = std::move(sample);
    }
  };

  const int threads = std::max(1, config.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return summary;
}

}  // namespace solenoid
