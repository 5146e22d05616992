#pragma once

#include <optional>

#include "solenoid/bohr.hpp"

namespace solenoid {

/// Compiled form of t -> sum c_k exp(i omega_k t) for the integrator's inner
/// loop: plain double arithmetic, no exact-rational work per evaluation.
class TrigEvaluator {
public:
  double real_at(double s) const;
  std::complex<double> at(double s) const;

private:
  friend TrigEvaluator compile_along_orbit(const BohrSeries&, const SolenoidPoint&, double);
  struct FoldedPair {
    double omega;
    double a, b;  // contributes 2 (a cos(omega s) - b sin(omega s))
  };
  struct Term {
    double omega;
    std::complex<double> c;
  };
  bool folded_ = false;
  double const_real_ = 0.0;
  std::complex<double> const_c_{0.0, 0.0};
  std::vector<FoldedPair> pairs_;
  std::vector<Term> terms_;
};

/// s -> f(x + pi_N(s)): per-term coefficient f_r chi_r(x), frequencies as
/// angular velocities.  Real-valued series fold conjugate pairs.
TrigEvaluator compile_along_orbit(const BohrSeries& f, const SolenoidPoint& x,
                                  double tol = 1e-12);

struct IntegratorSettings {
  double step = 0.0;  // 0 = auto: 1e-3 scaled by the mean return time
  double tol = 1e-12; // tail truncation tolerance along orbits
};

/// The linear flow phi^alpha(t, x) = pi_N(alpha t) + x.
class LinearFlow {
public:
  LinearFlow(SpecPtr spec, double alpha);
  double alpha() const { return alpha_; }
  const SpecPtr& spec() const { return spec_; }

private:
  SpecPtr spec_;
  double alpha_;
};

SolenoidPoint linear_evolve(const LinearFlow& flow, double t, const SolenoidPoint& x);
SolenoidPoint linear_evolve(const LinearFlow& flow, const Rational& t, const SolenoidPoint& x);

/// The flow generated by a positive vector field v: trajectories stay on the
/// arc through x, so evolution reduces to the scalar equation
/// ds/du = v(x + pi_N(s)) integrated by fixed-step classical RK4.
class GeneratedFlow {
public:
  explicit GeneratedFlow(BohrSeries v, IntegratorSettings settings = {});
  const BohrSeries& field() const { return v_; }
  const PositivityCertificate& certificate() const { return cert_; }
  const IntegratorSettings& settings() const { return settings_; }
  double step() const { return step_; }

private:
  BohrSeries v_;
  PositivityCertificate cert_;
  IntegratorSettings settings_;
  double step_;
};

SolenoidPoint flow_evolve(const GeneratedFlow& flow, double t, const SolenoidPoint& x);

/// Arc coordinate s(t) for each requested time (one integration pass per
/// sign, times need not be sorted).
std::vector<double> flow_arc_samples(const GeneratedFlow& flow, const SolenoidPoint& x,
                                     const std::vector<double>& times);

struct SectionReturn {
  double time;           // integral of lambda over one arc length
  SolenoidPoint landing; // x + pi_N(1), exact
};

/// First return to the Cantor section p_1^{-1}(p_1(x)): integrate until the
/// arc coordinate reaches exactly 1 (Newton-refined inside the last step).
SectionReturn section_return(const GeneratedFlow& flow, const SolenoidPoint& x);

/// tau_0 = lambda_0 and tau_r = lambda_r [chi_r(pi_N(1)) - 1] / (2 pi i r).
/// Level-0 brackets vanish identically.  A summable tail is expanded through
/// level J; the dropped part is bounded by the tail remainder at J.
BohrSeries return_time_series(const BohrSeries& lambda);

/// Jets of the field along its own flow; alias of jet_sequence.
std::vector<BohrSeries> field_jet(const BohrSeries& v, int k);

struct ConjugacyOptions {
  int grid_t = 20;
  int grid_x = 20;
  double t_min = -5.0;
  double t_max = 5.0;
  int depth = 0;  // 0 = J + 1
  double reciprocal_tol = 1e-12;
  IntegratorSettings integrator;
  std::optional<double> max_residual;  // throw ToleranceError when exceeded
};

/// The conjugacy h(x) = x + pi_N(alpha delta(x)) from a positive field to
/// the linear flow of slope alpha = 1/lambda_0, with delta_r =
/// lambda_r / (2 pi i r) and delta_0 = 0.  residual is the verified max of
/// metric(h(phi(t,x)), phi^alpha(t, h(x))) over the (t, x) grid.
struct ConjugacyData {
  BohrSeries lambda;
  BohrSeries delta;
  double alpha = 0.0;
  double residual = 0.0;
  double reciprocal_error = 0.0;
  ConjugacyOptions options;

  SolenoidPoint map(const SolenoidPoint& x) const;
};

ConjugacyData build_conjugacy(const BohrSeries& v, ConjugacyOptions options = {});

}  // namespace solenoid
