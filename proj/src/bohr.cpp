#include "solenoid/bohr.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace solenoid {

namespace {

constexpr std::complex<double> kTwoPiI{0.0, 2.0 * M_PI};
constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_zero(std::complex<double> c) { return c.real() == 0.0 && c.imag() == 0.0; }

long long next_pow2(long long n) {
  long long m = 1;
  while (m < n) m *= 2;
  return m;
}

}  // namespace

TailSpec TailSpec::rho(int start_level, std::complex<double> scale, TailPart part) {
  if (start_level < 1) throw DomainError("rho tail: start level must be >= 1");
  return TailSpec{start_level, scale, 1.0, 1, part};
}

TailSpec TailSpec::geometric(int start_level, std::complex<double> base, double ratio,
                             TailPart part) {
  if (start_level < 1) throw DomainError("geometric tail: start level must be >= 1");
  if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("geometric tail: ratio must be in (0, 1)");
  return TailSpec{start_level, base, ratio, 0, part};
}

TailSum tail_weighted_sum(const SolenoidSpec& spec, const TailSpec& tail, int from_level,
                          int extra_power) {
  const double mag = std::abs(tail.scale);
  if (mag == 0.0) return {0.0, true};
  if (!(tail.ratio > 0.0 && tail.ratio <= 1.0))
    throw DomainError("tail ratio must be in (0, 1]");
  const int J = spec.levels();
  const int w = tail.power + extra_power;
  // Per-cycle ratio of successive terms ratio^J / Q^w; boundary counts as
  // divergent so every certificate built on this sum stays conservative.
  const double log_R = J * std::log(tail.ratio) - w * spec.log_cycle_product();
  if (log_R >= -1e-12) return {kInf, false};
  const double R = std::exp(log_R);

  const int j0 = std::max(from_level, tail.start_level);
  double log_a = std::log(mag) + (j0 - tail.start_level) * std::log(tail.ratio);
  for (int j = 1; j <= j0; ++j) log_a -= w * std::log(static_cast<double>(spec.factor(j)));
  double a = std::exp(log_a);

  // One full cycle, then the exact geometric factor.
  double cycle = 0.0;
  for (int i = 0; i < J; ++i) {
    cycle += a;
    a *= tail.ratio * std::pow(static_cast<double>(spec.factor(j0 + 1 + i)), -w);
  }
  return {cycle / (1.0 - R) * (1.0 + 1e-12), true};
}

double tail_remainder_after(const SolenoidSpec& spec, const TailSpec& tail, int level) {
  const TailSum s = tail_weighted_sum(spec, tail, level + 1, 0);
  return s.finite ? s.value : kInf;
}

bool tail_summable(const SolenoidSpec& spec, const TailSpec& tail) {
  return tail_weighted_sum(spec, tail, tail.start_level, 0).finite;
}

int tail_truncation_level(const SolenoidSpec& spec, const TailSpec& tail, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (!tail_summable(spec, tail))
    throw DomainError("series tail is not absolutely summable; evaluate a partial_sum instead");
  int level = tail.start_level - 1;
  while (tail_remainder_after(spec, tail, level) >= tol) {
    ++level;
    if (level > tail.start_level + 500000)
      throw DomainError("tail truncation level exceeds sanity cap");
  }
  return level;
}

namespace {

// The (at most two) explicit terms a tail contributes at one level;
// level_gain is ratio^(j-start) / P_j^power.
void append_tail_level(const TailSpec& tail, int level, const BigInt& product, double level_gain,
                       std::vector<SeriesTerm>& out) {
  const Rational plus(BigInt(1), product);
  const std::complex<double> s = tail.scale;
  switch (tail.part) {
    case TailPart::full:
      out.push_back({plus, s * level_gain, level, 1});
      break;
    case TailPart::real_part:
      out.push_back({plus, 0.5 * s * level_gain, level, 1});
      out.push_back({-plus, 0.5 * std::conj(s) * level_gain, level, -1});
      break;
    case TailPart::imaginary_part: {
      const std::complex<double> half_over_i = s * std::complex<double>(0.0, -0.5);  // s/(2i)
      out.push_back({plus, half_over_i * level_gain, level, 1});
      out.push_back({-plus, std::conj(half_over_i) * level_gain, level, -1});
      break;
    }
  }
}

}  // namespace

TermList term_list(const BohrSeries& f, double tol, int max_tail_level) {
  const SolenoidSpec& spec = *f.spec();
  TermList out;
  out.terms.reserve(f.coefficients().size() + 8);
  for (const auto& [r, c] : f.coefficients())
    out.terms.push_back({frequency_value(spec, r), c, r.level, r.m});
  if (f.tail()) {
    const TailSpec& tail = *f.tail();
    int level = tail_truncation_level(spec, tail, tol);
    if (level > max_tail_level) {
      const double reachable = tail_remainder_after(spec, tail, max_tail_level);
      throw DomainError("insufficient point depth for tail truncation: need level " +
                        std::to_string(level) + ", best reachable bound " +
                        std::to_string(reachable));
    }
    BigInt product = spec.product_extended(tail.start_level);
    double gain = std::pow(to_double(product), -tail.power);
    for (int j = tail.start_level; j <= level; ++j) {
      append_tail_level(tail, j, product, gain, out.terms);
      product *= spec.factor(j + 1);
      gain *= tail.ratio * std::pow(static_cast<double>(spec.factor(j + 1)), -tail.power);
    }
    out.tail_bound = tail_remainder_after(spec, tail, level);
  }
  return out;
}

BohrSeries::BohrSeries(SpecPtr spec, bool real_valued)
    : spec_(std::move(spec)), real_(real_valued) {
  if (!spec_) throw DomainError("BohrSeries: null spec");
}

BohrSeries BohrSeries::constant(SpecPtr spec, std::complex<double> c) {
  BohrSeries s(std::move(spec), c.imag() == 0.0);
  s.set_coefficient(0, 0, c);
  return s;
}

bool BohrSeries::divergent_tail() const { return tail_ && !tail_summable(*spec_, *tail_); }

std::complex<double> BohrSeries::coefficient(const Frequency& r) const {
  const auto it = coeffs_.find(r);
  return it == coeffs_.end() ? std::complex<double>{0.0, 0.0} : it->second;
}

std::complex<double> BohrSeries::coefficient(int level, long long m) const {
  return coefficient(make_frequency(*spec_, level, m));
}

void BohrSeries::set_coefficient(int level, long long m, std::complex<double> c) {
  const Frequency r = make_frequency(*spec_, level, m);
  if (is_zero(c))
    coeffs_.erase(r);
  else
    coeffs_[r] = c;
}

void BohrSeries::merge_coefficient(int level, long long m, std::complex<double> c) {
  const Frequency r = make_frequency(*spec_, level, m);
  const auto it = coeffs_.find(r);
  const std::complex<double> sum = (it == coeffs_.end() ? c : it->second + c);
  if (is_zero(sum))
    coeffs_.erase(r);
  else
    coeffs_[r] = sum;
}

void BohrSeries::set_pair(int level, long long m, std::complex<double> c) {
  set_coefficient(level, m, c);
  set_coefficient(level, -m, std::conj(c));
}

void BohrSeries::set_tail(std::optional<TailSpec> tail) {
  if (tail && std::abs(tail->scale) == 0.0) tail.reset();
  if (tail && real_ && tail->part == TailPart::full)
    throw DomainError("a real-valued series cannot carry a full (complex) tail");
  tail_ = std::move(tail);
}

int BohrSeries::max_level() const {
  int level = 0;
  for (const auto& [r, c] : coeffs_) level = std::max(level, r.level);
  return level;
}

double BohrSeries::finite_l1() const {
  double sum = 0.0;
  for (const auto& [r, c] : coeffs_)
    if (!r.is_zero()) sum += std::abs(c);
  return sum;
}

long long BohrSeries::max_harmonic_index(int level) const {
  constexpr long long kClamp = 1LL << 30;
  long long best = 0;
  for (const auto& [r, c] : coeffs_) {
    __int128 idx = r.m < 0 ? -static_cast<__int128>(r.m) : r.m;
    for (int j = r.level + 1; j <= level; ++j) {
      idx *= spec_->factor(j);
      if (idx > kClamp) break;
    }
    best = std::max(best, static_cast<long long>(std::min<__int128>(idx, kClamp)));
  }
  return best;
}

void BohrSeries::check_real_invariant(double tol) const {
  if (!real_) return;
  double norm = 1.0;
  for (const auto& [r, c] : coeffs_) norm = std::max(norm, std::abs(c));
  for (const auto& [r, c] : coeffs_) {
    const std::complex<double> mirror = coefficient(negate(r));
    if (std::abs(c - std::conj(mirror)) > tol * norm)
      throw DomainError("real-valued flag broken: coefficient at -r is not the conjugate");
  }
  if (tail_ && tail_->part == TailPart::full)
    throw DomainError("real-valued flag broken: full complex tail");
}

EvalResult evaluate_at_time(const BohrSeries& f, const Rational& t, double tol) {
  const TermList list = term_list(f, tol);
  EvalResult out;
  out.tail_bound = list.tail_bound;
  for (const auto& term : list.terms) out.value += term.coeff * unit_phase(term.freq * t);
  return out;
}

EvalResult evaluate_at_time(const BohrSeries& f, double t, double tol) {
  return evaluate_at_time(f, rational_of(t), tol);
}

EvalResult evaluate_at_point(const BohrSeries& f, const SolenoidPoint& x, double tol) {
  if (*f.spec() != *x.spec()) throw DomainError("evaluate_at_point: spec mismatch");
  if (f.max_level() + 1 > x.depth())
    throw DomainError("evaluate_at_point: point depth " + std::to_string(x.depth()) +
                      " below coefficient level " + std::to_string(f.max_level()) + " + 1");
  const TermList list = term_list(f, tol, x.depth() - 1);
  EvalResult out;
  out.tail_bound = list.tail_bound;
  for (const auto& term : list.terms) {
    if (term.m == 0) {
      out.value += term.coeff;
      continue;
    }
    out.value += term.coeff * unit_phase(frac1(term.m * x.angle(term.level + 1)));
  }
  return out;
}

std::complex<double> mean_value(const BohrSeries& f) { return f.coefficient(Frequency{0, 0}); }

namespace {

void require_same_spec(const BohrSeries& f, const BohrSeries& g, const char* op) {
  if (*f.spec() != *g.spec()) throw DomainError(std::string(op) + ": series specs differ");
}

std::optional<TailSpec> combine_tails(const std::optional<TailSpec>& a,
                                      const std::optional<TailSpec>& b, double sign_b) {
  if (!a && !b) return std::nullopt;
  if (a && !b) return a;
  if (!a && b) {
    TailSpec t = *b;
    t.scale *= sign_b;
    return t;
  }
  if (!a->same_shape(*b))
    throw DomainError("cannot combine series with structurally different tails");
  TailSpec t = *a;
  t.scale += sign_b * b->scale;
  return t;
}

}  // namespace

BohrSeries add(const BohrSeries& f, const BohrSeries& g) {
  require_same_spec(f, g, "add");
  BohrSeries out(f.spec(), f.real_valued() && g.real_valued());
  for (const auto& [r, c] : f.coefficients()) out.merge_coefficient(r.level, r.m, c);
  for (const auto& [r, c] : g.coefficients()) out.merge_coefficient(r.level, r.m, c);
  out.set_tail(combine_tails(f.tail(), g.tail(), +1.0));
  return out;
}

BohrSeries subtract(const BohrSeries& f, const BohrSeries& g) {
  require_same_spec(f, g, "subtract");
  BohrSeries out(f.spec(), f.real_valued() && g.real_valued());
  for (const auto& [r, c] : f.coefficients()) out.merge_coefficient(r.level, r.m, c);
  for (const auto& [r, c] : g.coefficients()) out.merge_coefficient(r.level, r.m, -c);
  out.set_tail(combine_tails(f.tail(), g.tail(), -1.0));
  return out;
}

BohrSeries scale(const BohrSeries& f, std::complex<double> k) {
  BohrSeries out(f.spec(), f.real_valued() && k.imag() == 0.0);
  for (const auto& [r, c] : f.coefficients()) out.set_coefficient(r.level, r.m, k * c);
  if (f.tail()) {
    TailSpec t = *f.tail();
    t.scale *= k;
    out.set_tail(t);
  }
  return out;
}

BohrSeries multiply(const BohrSeries& f, const BohrSeries& g) {
  require_same_spec(f, g, "multiply");
  if (!f.finite() || !g.finite())
    throw DomainError("multiply: products of series with tails are not supported");
  BohrSeries out(f.spec(), f.real_valued() && g.real_valued());
  const SolenoidSpec& spec = *f.spec();
  for (const auto& [ra, ca] : f.coefficients())
    for (const auto& [rb, cb] : g.coefficients()) {
      const Frequency r = add_frequencies(spec, ra, rb);
      out.merge_coefficient(r.level, r.m, ca * cb);
    }
  return out;
}

BohrSeries derivative(const BohrSeries& f) {
  BohrSeries out(f.spec(), f.real_valued());
  const SolenoidSpec& spec = *f.spec();
  for (const auto& [r, c] : f.coefficients()) {
    if (r.is_zero()) continue;
    out.set_coefficient(r.level, r.m, c * kTwoPiI * to_double(frequency_value(spec, r)));
  }
  if (f.tail()) {
    TailSpec t = *f.tail();
    t.scale *= kTwoPiI;
    t.power += 1;
    out.set_tail(t);
  }
  return out;
}

BohrSeries formal_integral(const BohrSeries& f) {
  if (!is_zero(mean_value(f)))
    throw DomainError("formal_integral: nonzero mean (subtract mean_value first)");
  BohrSeries out(f.spec(), f.real_valued());
  const SolenoidSpec& spec = *f.spec();
  for (const auto& [r, c] : f.coefficients())
    out.set_coefficient(r.level, r.m, c / (kTwoPiI * to_double(frequency_value(spec, r))));
  if (f.tail()) {
    TailSpec t = *f.tail();
    t.scale /= kTwoPiI;
    t.power -= 1;
    out.set_tail(t);
  }
  return out;
}

BohrSeries partial_sum(const BohrSeries& f, int j) {
  const SolenoidSpec& spec = *f.spec();
  if (j < 0 || j > spec.levels()) throw DomainError("partial_sum: level outside [0, J]");
  BohrSeries out(f.spec(), f.real_valued());
  for (const auto& [r, c] : f.coefficients())
    if (r.level <= j) out.set_coefficient(r.level, r.m, c);
  if (f.tail()) {
    const TailSpec& tail = *f.tail();
    std::vector<SeriesTerm> terms;
    BigInt product = spec.product_extended(tail.start_level);
    double gain = std::pow(to_double(product), -tail.power);
    for (int level = tail.start_level; level <= j; ++level) {
      append_tail_level(tail, level, product, gain, terms);
      product *= spec.factor(level + 1);
      gain *= tail.ratio * std::pow(static_cast<double>(spec.factor(level + 1)), -tail.power);
    }
    for (const auto& term : terms) out.merge_coefficient(term.level, term.m, term.coeff);
  }
  return out;
}

std::vector<std::complex<double>> sample_uniform(const BohrSeries& f, const Rational& t0,
                                                 const Rational& dt, int count, double tol) {
  const TermList list = term_list(f, tol);
  std::vector<std::complex<double>> out(static_cast<size_t>(count), {0.0, 0.0});
  constexpr int kAnchor = 256;  // kill phase-recurrence drift periodically
  for (const auto& term : list.terms) {
    const std::complex<double> step = unit_phase(term.freq * dt);
    std::complex<double> w = unit_phase(term.freq * t0);
    for (int k = 0; k < count; ++k) {
      if (k % kAnchor == 0 && k > 0) w = unit_phase(term.freq * (t0 + k * dt));
      out[static_cast<size_t>(k)] += term.coeff * w;
      w *= step;
    }
  }
  return out;
}

namespace {

// Samples of the finite part only, over t0 + k dt.
std::vector<double> sample_finite_real(const BohrSeries& f, const Rational& t0,
                                       const Rational& dt, int count) {
  BohrSeries finite_part(f.spec(), f.real_valued());
  for (const auto& [r, c] : f.coefficients()) finite_part.set_coefficient(r.level, r.m, c);
  const auto vals = sample_uniform(finite_part, t0, dt, count);
  std::vector<double> out(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) out[i] = vals[i].real();
  return out;
}

}  // namespace

PositivityCertificate positivity_certificate(const BohrSeries& v, int level) {
  if (!v.real_valued()) throw DomainError("positivity_certificate: series must be real-valued");
  const SolenoidSpec& spec = *v.spec();
  if (level < 0 || level > spec.levels())
    throw DomainError("positivity_certificate: level outside [0, J]");
  const int j = std::max(level, v.max_level());

  const long long q = std::max<long long>(1, v.max_harmonic_index(j));
  const int grid = static_cast<int>(std::min(next_pow2(8 * q), 1LL << 22));
  const Rational period(spec.product(j), 1);
  const Rational dt(spec.product(j), grid);
  const double step = to_double(period) / grid;

  const auto samples = sample_finite_real(v, Rational(0), dt, grid);
  const double min_sample = *std::min_element(samples.begin(), samples.end());

  double lipschitz = 0.0;
  for (const auto& [r, c] : v.coefficients())
    lipschitz += 2.0 * M_PI * std::abs(to_double(frequency_value(spec, r))) * std::abs(c);
  double tail_sup = 0.0;
  if (v.tail()) {
    const TailSum lip_tail = tail_weighted_sum(spec, *v.tail(), v.tail()->start_level, +1);
    lipschitz += lip_tail.finite ? 2.0 * M_PI * lip_tail.value : kInf;
    tail_sup = tail_remainder_after(spec, *v.tail(), v.tail()->start_level - 1);
  }

  PositivityCertificate cert;
  cert.min_sample = min_sample;
  cert.lipschitz = lipschitz;
  cert.step = step;
  cert.min_bound = min_sample - lipschitz * step / 2.0 - tail_sup;
  cert.certified = std::isfinite(cert.min_bound) && cert.min_bound > 0.0;
  return cert;
}

namespace {

// FFTW planning is not thread-safe (execution is).
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

struct FftBuffer {
  explicit FftBuffer(int n) : n_(n) {
    data_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<size_t>(n)));
    if (!data_) throw std::bad_alloc();
  }
  ~FftBuffer() { fftw_free(data_); }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  std::complex<double>& operator[](size_t i) {
    return *reinterpret_cast<std::complex<double>*>(data_ + i);
  }
  void transform(int sign) {
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(fftw_plan_mutex());
      plan = fftw_plan_dft_1d(n_, data_, data_, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }

  int n_;
  fftw_complex* data_;
};

}  // namespace

ReciprocalResult reciprocal(const BohrSeries& v, int level, double tol) {
  if (!v.real_valued()) throw DomainError("reciprocal: series must be real-valued");
  const SolenoidSpec& spec = *v.spec();
  if (level < 0 || level > spec.levels()) throw DomainError("reciprocal: level outside [0, J]");
  if (!(tol > 0.0)) throw DomainError("reciprocal: tolerance must be positive");

  const BohrSeries vt =
      (v.finite() && v.max_level() <= level) ? v : partial_sum(v, level);
  const PositivityCertificate cert = positivity_certificate(vt, level);
  if (!cert.certified)
    throw DomainError("reciprocal: field is not certified positive (bound " +
                      std::to_string(cert.min_bound) + ")");

  const long long k_in = std::max<long long>(1, vt.max_harmonic_index(level));
  long long k_out = std::max<long long>(16, 4 * k_in);
  const BigInt& period = spec.product(level);

  for (int attempt = 0; attempt < 8; ++attempt, k_out *= 2) {
    const long long grid_ll = next_pow2(8 * k_out);
    if (grid_ll > (1LL << 22)) break;
    const int grid = static_cast<int>(grid_ll);

    const auto vals = sample_uniform(vt, Rational(0), Rational(period, grid), grid);
    FftBuffer buf(grid);
    for (int k = 0; k < grid; ++k)
      buf[static_cast<size_t>(k)] = {1.0 / vals[static_cast<size_t>(k)].real(), 0.0};
    buf.transform(FFTW_FORWARD);  // bin m is the projection onto e^{2 pi i m t / P}

    BohrSeries out(v.spec(), true);
    out.set_coefficient(level, 0, buf[0].real() / grid);
    // Discard below-tol coefficients smallest-first, but cap the total
    // discarded mass at 10 tol: wide spectra can hold 10^2..10^3 bins just
    // under tol whose combined mass would defeat the 100 tol gate.
    std::vector<std::pair<double, long long>> below;
    for (long long m = 1; m <= k_out; ++m) {
      const std::complex<double> c = buf[static_cast<size_t>(m)] / static_cast<double>(grid);
      if (std::abs(c) >= tol)
        out.set_pair(level, m, c);
      else
        below.emplace_back(std::abs(c), m);
    }
    std::sort(below.begin(), below.end());
    double dropped = 0.0;
    for (auto it = below.begin(); it != below.end(); ++it) {
      dropped += 2.0 * it->first;
      if (dropped > 10.0 * tol) {
        for (; it != below.end(); ++it)
          out.set_pair(level, it->second,
                       buf[static_cast<size_t>(it->second)] / static_cast<double>(grid));
        break;
      }
    }

    // Reconstruct the kept harmonics on the same grid and monitor
    // max |lambda_e v_e - 1| unconditionally.
    FftBuffer recon(grid);
    for (int k = 0; k < grid; ++k) recon[static_cast<size_t>(k)] = {0.0, 0.0};
    for (const auto& [r, c] : out.coefficients()) {
      const long long idx = r.m * (spec.product(level) / spec.product(r.level)).convert_to<long long>();
      recon[static_cast<size_t>(idx >= 0 ? idx : grid + idx)] = c;
    }
    recon.transform(FFTW_BACKWARD);

    double err = 0.0;
    for (int k = 0; k < grid; ++k)
      err = std::max(err, std::abs(recon[static_cast<size_t>(k)].real() *
                                       vals[static_cast<size_t>(k)].real() -
                                   1.0));
    if (err <= 100.0 * tol) return {std::move(out), err, grid};
  }
  throw ToleranceError("reciprocal: reconstruction error above 100*tol; increase level or grid");
}

double holder_estimate(const BohrSeries& f, double alpha, int trials) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("holder_estimate: alpha must be in (0, 1]");
  const SolenoidSpec& spec = *f.spec();
  int level = f.max_level();
  if (f.tail()) level = std::min(spec.levels(), std::max(level, f.tail()->start_level + 8));
  const double span = to_double(spec.product(level));
  const int nt = std::max(4, trials);

  double best = 0.0;
  for (int i = 0; i < nt; ++i) {
    const double t = span * i / nt;
    for (int d = 0; d < 25; ++d) {
      const double delta = std::pow(10.0, -6.0 + 6.0 * d / 24.0);
      const auto hi = evaluate_at_time(f, t + delta).value;
      const auto lo = evaluate_at_time(f, t).value;
      best = std::max(best, std::abs(hi - lo) / std::pow(delta, alpha));
    }
  }
  return best;
}

double d1_distance(const BohrSeries& f, const BohrSeries& g) {
  require_same_spec(f, g, "d1_distance");
  const BohrSeries diff = subtract(f, g);
  const SolenoidSpec& spec = *f.spec();
  if (diff.coefficients().empty() && diff.finite()) return 0.0;

  int level = diff.max_level();
  int grid;
  if (diff.finite()) {
    // Oversample past the harmonic index so the grid mean equals the true
    // mean exactly (the openness argument leans on this).
    const long long q = diff.max_harmonic_index(level);
    grid = static_cast<int>(std::min(next_pow2(std::max<long long>(64, 2 * q + 2)), 1LL << 20));
  } else {
    level = std::min(spec.levels(), std::max(level, diff.tail()->start_level + 10));
    const long long q = std::max<long long>(1, diff.max_harmonic_index(level));
    grid = static_cast<int>(std::min(next_pow2(std::max<long long>(512, 8 * q)), 1LL << 20));
  }
  const auto vals = sample_uniform(diff, Rational(0), Rational(spec.product(level), grid), grid);
  double best = 0.0;
  for (const auto& z : vals) best = std::max(best, std::abs(z));
  return best;
}

std::vector<BohrSeries> jet_sequence(const BohrSeries& v, int k) {
  if (k < 1) throw DomainError("jet_sequence: order must be >= 1");
  if (!v.finite()) throw DomainError("jet_sequence: finite series required (divergent jets)");
  std::vector<BohrSeries> jets;
  jets.reserve(static_cast<size_t>(k));
  jets.push_back(v);
  for (int j = 1; j < k; ++j) jets.push_back(multiply(derivative(jets.back()), v));
  return jets;
}

double dk_distance(const BohrSeries& v, const BohrSeries& w, int k) {
  require_same_spec(v, w, "dk_distance");
  if (k < 1) throw DomainError("dk_distance: k must be >= 1");
  const auto jv = jet_sequence(v, k);
  const auto jw = jet_sequence(w, k);
  double sum = 0.0;
  for (int j = 0; j < k; ++j) sum += d1_distance(jv[static_cast<size_t>(j)], jw[static_cast<size_t>(j)]);
  return sum;
}

double dinf_distance(const BohrSeries& v, const BohrSeries& w, int terms) {
  require_same_spec(v, w, "dinf_distance");
  if (terms < 1) throw DomainError("dinf_distance: need at least one term");
  const auto jv = jet_sequence(v, terms);
  const auto jw = jet_sequence(w, terms);
  double sum = 0.0;
  double dk = 0.0;
  for (int r = 1; r <= terms; ++r) {
    dk += d1_distance(jv[static_cast<size_t>(r - 1)], jw[static_cast<size_t>(r - 1)]);
    sum += std::ldexp(dk / (1.0 + dk), -r);
  }
  return sum;
}

}  // namespace solenoid
