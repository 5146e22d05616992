#include "solenoid/flows.hpp"

#include <algorithm>
#include <cmath>

namespace solenoid {

double TrigEvaluator::real_at(double s) const {
  if (folded_) {
    double sum = const_real_;
    for (const auto& p : pairs_) {
      const double c = std::cos(p.omega * s);
      const double sn = std::sin(p.omega * s);
      sum += 2.0 * (p.a * c - p.b * sn);
    }
    return sum;
  }
  return at(s).real();
}

std::complex<double> TrigEvaluator::at(double s) const {
  if (folded_) return {real_at(s), 0.0};
  std::complex<double> sum = const_c_;
  for (const auto& t : terms_)
    sum += t.c * std::complex<double>(std::cos(t.omega * s), std::sin(t.omega * s));
  return sum;
}

TrigEvaluator compile_along_orbit(const BohrSeries& f, const SolenoidPoint& x, double tol) {
  if (*f.spec() != *x.spec()) throw DomainError("compile_along_orbit: spec mismatch");
  if (f.max_level() + 1 > x.depth())
    throw DomainError("compile_along_orbit: point depth below coefficient level + 1");
  const TermList list = term_list(f, tol, x.depth() - 1);
  TrigEvaluator ev;
  ev.folded_ = f.real_valued();
  for (const auto& term : list.terms) {
    std::complex<double> c = term.coeff;
    if (term.m != 0) c *= unit_phase(frac1(term.m * x.angle(term.level + 1)));
    const double omega = 2.0 * M_PI * to_double(term.freq);
    if (ev.folded_) {
      if (term.freq == 0)
        ev.const_real_ += c.real();
      else if (term.freq > 0)
        ev.pairs_.push_back({omega, c.real(), c.imag()});
      // negative side folds into its positive partner
    } else {
      if (term.freq == 0)
        ev.const_c_ += c;
      else
        ev.terms_.push_back({omega, c});
    }
  }
  return ev;
}

namespace {

double rk4_step(const TrigEvaluator& g, double s, double h) {
  const double k1 = g.real_at(s);
  const double k2 = g.real_at(s + 0.5 * h * k1);
  const double k3 = g.real_at(s + 0.5 * h * k2);
  const double k4 = g.real_at(s + h * k3);
  return s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Fixed-step RK4 over a signed time span, starting from arc coordinate s0.
double integrate_span(const TrigEvaluator& g, double s0, double span, double step) {
  if (span == 0.0) return s0;
  const double steps_d = std::ceil(std::abs(span) / step);
  if (!(steps_d < 9e15)) throw DomainError("flow integration: step underflow");
  const long long steps = std::max(1LL, static_cast<long long>(steps_d));
  const double h = span / static_cast<double>(steps);
  double s = s0;
  for (long long i = 0; i < steps; ++i) s = rk4_step(g, s, h);
  return s;
}

}  // namespace

LinearFlow::LinearFlow(SpecPtr spec, double alpha) : spec_(std::move(spec)), alpha_(alpha) {
  if (!(alpha > 0.0)) throw DomainError("LinearFlow: alpha must be positive");
}

SolenoidPoint linear_evolve(const LinearFlow& flow, double t, const SolenoidPoint& x) {
  return add(pi_N(flow.spec(), flow.alpha() * t, x.depth()), x);
}

SolenoidPoint linear_evolve(const LinearFlow& flow, const Rational& t, const SolenoidPoint& x) {
  return add(pi_N(flow.spec(), rational_of(flow.alpha()) * t, x.depth()), x);
}

GeneratedFlow::GeneratedFlow(BohrSeries v, IntegratorSettings settings)
    : v_(std::move(v)), settings_(settings) {
  if (!v_.real_valued()) throw DomainError("GeneratedFlow: field must be real-valued");
  cert_ = positivity_certificate(v_, v_.max_level());
  if (!cert_.certified)
    throw DomainError("GeneratedFlow: field positivity is not certified (bound " +
                      std::to_string(cert_.min_bound) + ")");
  if (v_.tail() && tail_remainder_after(*v_.spec(), *v_.tail(), v_.tail()->start_level - 1) >=
                       cert_.min_bound)
    throw DomainError("GeneratedFlow: tail remainder exceeds the certified minimum");
  const double v0 = mean_value(v_).real();
  step_ = settings_.step > 0.0 ? settings_.step : 1e-3 / v0;
}

SolenoidPoint flow_evolve(const GeneratedFlow& flow, double t, const SolenoidPoint& x) {
  const TrigEvaluator g = compile_along_orbit(flow.field(), x, flow.settings().tol);
  const double s = integrate_span(g, 0.0, t, flow.step());
  return add(x, pi_N(x.spec(), s, x.depth()));
}

std::vector<double> flow_arc_samples(const GeneratedFlow& flow, const SolenoidPoint& x,
                                     const std::vector<double>& times) {
  const TrigEvaluator g = compile_along_orbit(flow.field(), x, flow.settings().tol);
  std::vector<size_t> order(times.size());
  for (size_t i = 0; i < times.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::abs(times[a]) < std::abs(times[b]);
  });
  std::vector<double> out(times.size(), 0.0);
  double s_pos = 0.0, t_pos = 0.0;  // forward frontier
  double s_neg = 0.0, t_neg = 0.0;  // backward frontier
  for (size_t i : order) {
    const double t = times[i];
    if (t >= 0.0) {
      s_pos = integrate_span(g, s_pos, t - t_pos, flow.step());
      t_pos = t;
      out[i] = s_pos;
    } else {
      s_neg = integrate_span(g, s_neg, t - t_neg, flow.step());
      t_neg = t;
      out[i] = s_neg;
    }
  }
  return out;
}

SectionReturn section_return(const GeneratedFlow& flow, const SolenoidPoint& x) {
  const TrigEvaluator g = compile_along_orbit(flow.field(), x, flow.settings().tol);
  const double h = flow.step();
  const long long max_steps =
      static_cast<long long>(std::ceil(1.0 / (flow.certificate().min_bound * h))) + 16;
  double t = 0.0, s = 0.0;
  for (long long i = 0; i <= max_steps; ++i) {
    const double s_next = rk4_step(g, s, h);
    if (s_next >= 1.0) {
      // Newton on dt inside this step: advance from s with one RK4 substep.
      double dt = (1.0 - s) / g.real_at(s);
      for (int it = 0; it < 8; ++it) {
        const double s_try = rk4_step(g, s, dt);
        const double err = 1.0 - s_try;
        if (std::abs(err) < 1e-15) break;
        dt += err / g.real_at(s_try);
        dt = std::clamp(dt, 0.0, 2.0 * h);
      }
      return {t + dt, add(x, pi_N(x.spec(), Rational(1), x.depth()))};
    }
    s = s_next;
    t += h;
  }
  throw DomainError("section_return: section not reached within the expected time");
}

BohrSeries return_time_series(const BohrSeries& lambda) {
  if (!lambda.real_valued()) throw DomainError("return_time_series: lambda must be real-valued");
  const SolenoidSpec& spec = *lambda.spec();
  BohrSeries out(lambda.spec(), true);

  const auto bracket_transform = [&](const Rational& freq,
                                     std::complex<double> c) -> std::complex<double> {
    // [chi_r(pi_N(1)) - 1] / (2 pi i r); exactly zero at integer frequencies.
    const std::complex<double> bracket = unit_phase(freq) - std::complex<double>(1.0, 0.0);
    if (bracket == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};
    return c * bracket / (std::complex<double>(0.0, 2.0 * M_PI) * to_double(freq));
  };

  for (const auto& [r, c] : lambda.coefficients()) {
    if (r.is_zero()) {
      out.merge_coefficient(0, 0, c);
      continue;
    }
    out.merge_coefficient(r.level, r.m, bracket_transform(frequency_value(spec, r), c));
  }
  if (lambda.tail()) {
    // Expanded through level J; |bracket/(2 pi i r)| <= 1, so the dropped
    // part is within the tail remainder at J.
    if (!tail_summable(spec, *lambda.tail()))
      throw DomainError("return_time_series: tail is not absolutely summable");
    BohrSeries tail_only(lambda.spec(), lambda.real_valued());
    tail_only.set_tail(lambda.tail());
    const BohrSeries expanded = partial_sum(tail_only, spec.levels());
    for (const auto& [r, c] : expanded.coefficients())
      out.merge_coefficient(r.level, r.m, bracket_transform(frequency_value(spec, r), c));
  }
  return out;
}

std::vector<BohrSeries> field_jet(const BohrSeries& v, int k) { return jet_sequence(v, k); }

SolenoidPoint ConjugacyData::map(const SolenoidPoint& x) const {
  const double dx = evaluate_at_point(delta, x).value.real();
  return add(x, pi_N(x.spec(), alpha * dx, x.depth()));
}

ConjugacyData build_conjugacy(const BohrSeries& v, ConjugacyOptions options) {
  if (!v.finite()) throw DomainError("build_conjugacy: finite field required");
  const SpecPtr spec = v.spec();
  GeneratedFlow flow(v, options.integrator);

  ReciprocalResult rec = reciprocal(v, v.max_level(), options.reciprocal_tol);
  const double lambda0 = mean_value(rec.series).real();
  const double alpha = 1.0 / lambda0;
  const BohrSeries delta =
      formal_integral(subtract(rec.series, BohrSeries::constant(spec, lambda0)));

  const int depth = options.depth > 0 ? options.depth : spec->levels() + 1;
  std::vector<double> times(static_cast<size_t>(options.grid_t));
  for (int j = 0; j < options.grid_t; ++j)
    times[static_cast<size_t>(j)] =
        options.t_min + (j + 0.5) * (options.t_max - options.t_min) / options.grid_t;

  ConjugacyData data{rec.series, delta, alpha, 0.0, rec.reconstruction_error, options};

  double residual = 0.0;
  for (int i = 0; i < options.grid_x; ++i) {
    const SolenoidPoint x =
        SolenoidPoint::from_deepest_angle(spec, Rational(2 * i + 1, 2 * options.grid_x), depth);
    const SolenoidPoint hx = data.map(x);
    const std::vector<double> arcs = flow_arc_samples(flow, x, times);
    for (size_t j = 0; j < times.size(); ++j) {
      const SolenoidPoint phi = add(x, pi_N(spec, arcs[j], depth));
      const SolenoidPoint lhs = data.map(phi);
      const SolenoidPoint rhs = add(hx, pi_N(spec, alpha * times[j], depth));
      residual = std::max(residual, metric(lhs, rhs).value);
    }
  }
  data.residual = residual;
  if (options.max_residual && residual > *options.max_residual)
    throw ToleranceError("build_conjugacy: residual " + std::to_string(residual) +
                         " above tolerance");
  return data;
}

}  // namespace solenoid
