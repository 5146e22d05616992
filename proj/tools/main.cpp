// solenoid-lab: command-line front end.  Parses specs and series from JSON,
// dispatches to the library, and emits CSV/JSON artifacts for offline
// analysis and plotting.  Every command is a pure function of its input
// files, flags and seed.
//
// Exit codes: 0 ok (classify: almost periodic), 2 malformed input,
// 3 domain error, 4 tolerance not met, 10 classify: not almost periodic,
// 11 classify: inconclusive.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "solenoid/json_io.hpp"

using namespace solenoid;

namespace {

struct CommonArgs {
  std::string spec_path;
  std::string series_path;
  std::string out_path;  // empty or "-" = stdout
};

void add_common(CLI::App* cmd, CommonArgs& args, bool series_required) {
  cmd->add_option("--spec", args.spec_path, "solenoid spec JSON file");
  auto* s = cmd->add_option("--series", args.series_path, "series JSON file");
  if (series_required) s->required();
  cmd->add_option("--out", args.out_path, "output file (default stdout)");
}

SpecPtr load_spec(const std::string& path) {
  return path.empty() ? nullptr : spec_from_json(load_json_file(path));
}

BohrSeries load_series(const CommonArgs& args) {
  return series_from_json(load_json_file(args.series_path), load_spec(args.spec_path));
}

void emit(const CommonArgs& args, const std::string& content) {
  if (args.out_path.empty() || args.out_path == "-")
    std::cout << content;
  else
    write_text_file(args.out_path, content);
}

std::vector<Rational> parse_time_list(const std::string& csv) {
  std::vector<Rational> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_rational(item));
  }
  if (out.empty()) throw ParseError("--times: no values parsed");
  return out;
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("SOLENOID_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for flows and Fourier series on solenoids"};
  app.require_subcommand(1);

  // eval
  CommonArgs eval_args;
  double eval_t0 = 0.0, eval_t1 = 1.0, eval_tol = 1e-12;
  int eval_steps = 101;
  auto* cmd_eval = app.add_subcommand("eval", "evaluate a series over a time range (CSV)");
  add_common(cmd_eval, eval_args, true);
  cmd_eval->add_option("--t-start", eval_t0, "first sample time");
  cmd_eval->add_option("--t-end", eval_t1, "last sample time");
  cmd_eval->add_option("--t-steps", eval_steps, "number of samples")->check(CLI::PositiveNumber);
  cmd_eval->add_option("--tol", eval_tol, "tail truncation tolerance");

  // classify
  CommonArgs cls_args;
  int cls_nmax = 5;
  double cls_tmax = 1e6;
  auto* cmd_classify =
      app.add_subcommand("classify", "almost-periodicity verdict (exit 0/10/11)");
  add_common(cmd_classify, cls_args, true);
  cmd_classify->add_option("--n-max", cls_nmax, "crossing levels to search");
  cmd_classify->add_option("--t-max", cls_tmax, "scan horizon");

  // flow
  CommonArgs flow_args;
  double flow_time = 1.0, flow_step = 0.0;
  int flow_rows = 101, flow_depth = 0;
  std::string flow_point;
  auto* cmd_flow = app.add_subcommand("flow", "integrate the generated flow (trajectory CSV)");
  add_common(cmd_flow, flow_args, true);
  cmd_flow->add_option("--time", flow_time, "final time");
  cmd_flow->add_option("--rows", flow_rows, "sample rows")->check(CLI::PositiveNumber);
  cmd_flow->add_option("--point", flow_point, "start point JSON file (default identity)");
  cmd_flow->add_option("--depth", flow_depth, "point depth (default J+1)");
  cmd_flow->add_option("--step", flow_step, "integrator step (default auto)");

  // return-time
  CommonArgs rt_args;
  auto* cmd_return = app.add_subcommand("return-time", "section return-time series (JSON)");
  add_common(cmd_return, rt_args, true);

  // conjugate
  CommonArgs conj_args;
  ConjugacyOptions conj_opts;
  double conj_tol = 1e-6;
  auto* cmd_conj = app.add_subcommand("conjugate", "build and verify the conjugacy (JSON)");
  add_common(cmd_conj, conj_args, true);
  cmd_conj->add_option("--tol", conj_tol, "residual gate (exit 4 above it)");
  cmd_conj->add_option("--grid-t", conj_opts.grid_t, "verification grid: time samples");
  cmd_conj->add_option("--grid-x", conj_opts.grid_x, "verification grid: points");
  cmd_conj->add_option("--t-min", conj_opts.t_min, "verification grid: first time");
  cmd_conj->add_option("--t-max", conj_opts.t_max, "verification grid: last time");
  cmd_conj->add_option("--depth", conj_opts.depth, "point depth (default J+1)");
  cmd_conj->add_option("--step", conj_opts.integrator.step, "integrator step (default auto)");

  // integral-curve
  CommonArgs ic_args;
  std::string ic_times;
  double ic_tmax = 0.0, ic_tol = 1e-9;
  int ic_points = 65;
  auto* cmd_ic = app.add_subcommand(
      "integral-curve", "closed-form I(T) = integral of lambda_e - lambda_0 (CSV)");
  add_common(cmd_ic, ic_args, true);
  cmd_ic->add_option("--times", ic_times, "comma list of times (rationals like 1024/3 allowed)");
  cmd_ic->add_option("--t-max", ic_tmax, "log-grid horizon (used when --times absent)");
  cmd_ic->add_option("--t-points", ic_points, "log-grid size")->check(CLI::PositiveNumber);
  cmd_ic->add_option("--tol", ic_tol, "tail truncation tolerance");

  // perturb
  CommonArgs pert_args;
  double pert_eps = 1e-3, pert_tmax = 1e4;
  int pert_nmax = 3;
  auto* cmd_perturb =
      app.add_subcommand("perturb", "rho-perturb a field into the non-almost-periodic class");
  add_common(cmd_perturb, pert_args, true);
  cmd_perturb->add_option("--epsilon", pert_eps, "perturbation size bound")->required();
  cmd_perturb->add_option("--n-max", pert_nmax, "crossing levels for the classifier");
  cmd_perturb->add_option("--t-max", pert_tmax, "classifier scan horizon");

  // experiment
  CommonArgs exp_args;
  ExperimentConfig exp_cfg;
  std::string exp_eps = "1e-1,1e-2,1e-3";
  int exp_threads = 0;
  std::uint64_t exp_seed = 0;
  auto* cmd_exp = app.add_subcommand("experiment", "genericity experiment (summary JSON)");
  add_common(cmd_exp, exp_args, false);
  cmd_exp->add_option("--samples", exp_cfg.samples, "random fields to draw")->required();
  cmd_exp->add_option("--seed", exp_seed, "master seed")->required();
  cmd_exp->add_option("--epsilons", exp_eps, "comma list of perturbation sizes");
  cmd_exp->add_option("--threads", exp_threads,
                      "worker threads (or SOLENOID_LAB_THREADS; summary is thread-count independent)");
  cmd_exp->add_option("--n-max", exp_cfg.n_max, "crossing levels");
  cmd_exp->add_option("--t-max", exp_cfg.T_max, "classifier scan horizon");
  cmd_exp->add_option("--max-level", exp_cfg.max_level, "levels used by random fields");

  // dk
  CommonArgs dk_args;
  std::string dk_series2;
  int dk_k = 1;
  bool dk_inf = false;
  auto* cmd_dk = app.add_subcommand("dk", "C^k field distance d_k or d_inf (JSON)");
  add_common(cmd_dk, dk_args, true);
  cmd_dk->add_option("--series2", dk_series2, "second series JSON file")->required();
  cmd_dk->add_option("--k", dk_k, "jet order");
  cmd_dk->add_flag("--inf", dk_inf, "compute d_inf instead");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_eval) {
      const BohrSeries f = load_series(eval_args);
      std::vector<double> times;
      for (int i = 0; i < eval_steps; ++i)
        times.push_back(eval_steps == 1
                            ? eval_t0
                            : eval_t0 + i * (eval_t1 - eval_t0) / (eval_steps - 1));
      std::ostringstream os;
      write_eval_csv(os, f, times, eval_tol);
      emit(eval_args, os.str());
      return 0;
    }

    if (*cmd_classify) {
      const BohrSeries lambda = load_series(cls_args);
      const APReport report = classify(lambda, cls_nmax, cls_tmax);
      emit(cls_args, to_json(report).dump(2) + "\n");
      switch (report.verdict) {
        case Verdict::almost_periodic: return 0;
        case Verdict::not_almost_periodic: return 10;
        case Verdict::inconclusive: return 11;
      }
    }

    if (*cmd_flow) {
      const BohrSeries v = load_series(flow_args);
      IntegratorSettings settings;
      settings.step = flow_step;
      const GeneratedFlow flow(v, settings);
      const int depth = flow_depth > 0 ? flow_depth : v.spec()->levels() + 1;
      const SolenoidPoint x = flow_point.empty()
                                  ? SolenoidPoint::identity(v.spec(), depth)
                                  : point_from_json(v.spec(), load_json_file(flow_point));
      std::vector<double> times;
      for (int i = 0; i < flow_rows; ++i)
        times.push_back(flow_rows == 1 ? flow_time : flow_time * i / (flow_rows - 1));
      std::ostringstream os;
      write_trajectory_csv(os, flow, x, times);
      emit(flow_args, os.str());
      return 0;
    }

    if (*cmd_return) {
      const BohrSeries lambda = load_series(rt_args);
      emit(rt_args, to_json(return_time_series(lambda)).dump(2) + "\n");
      return 0;
    }

    if (*cmd_conj) {
      const BohrSeries v = load_series(conj_args);
      const ConjugacyData data = build_conjugacy(v, conj_opts);
      emit(conj_args, conjugacy_report_json(data).dump(2) + "\n");
      return data.residual <= conj_tol ? 0 : 4;
    }

    if (*cmd_ic) {
      const BohrSeries lambda = load_series(ic_args);
      std::vector<Rational> times;
      if (!ic_times.empty()) {
        times = parse_time_list(ic_times);
      } else {
        if (!(ic_tmax > 1.0)) throw DomainError("integral-curve: give --times or --t-max > 1");
        for (int i = 0; i < ic_points; ++i)
          times.push_back(rational_of(
              std::pow(10.0, std::log10(ic_tmax) * i / std::max(1, ic_points - 1))));
      }
      std::ostringstream os;
      write_integral_curve_csv(os, integral_curve(lambda, times, ic_tol));
      emit(ic_args, os.str());
      return 0;
    }

    if (*cmd_perturb) {
      const BohrSeries lambda = load_series(pert_args);
      const PerturbResult result = perturb_to_generic(lambda, pert_eps, pert_nmax, pert_tmax);
      Json out{{"epsilon", pert_eps},
               {"m", result.m},
               {"part", to_string(result.part)},
               {"d1", result.d1},
               {"success", result.success},
               {"report", to_json(result.report)},
               {"series", to_json(result.field)}};
      if (result.other_report) out["other_report"] = to_json(*result.other_report);
      emit(pert_args, out.dump(2) + "\n");
      return 0;
    }

    if (*cmd_exp) {
      if (exp_args.spec_path.empty()) throw ParseError("experiment: --spec is required");
      const SpecPtr spec = load_spec(exp_args.spec_path);
      exp_cfg.seed = exp_seed;
      exp_cfg.threads = resolve_threads(exp_threads);
      std::vector<double> eps;
      for (const Rational& q : parse_time_list(exp_eps)) eps.push_back(to_double(q));
      exp_cfg.epsilons = std::move(eps);
      const ExperimentSummary summary = genericity_experiment(spec, exp_cfg);
      emit(exp_args, to_json(summary).dump(2) + "\n");
      return 0;
    }

    if (*cmd_dk) {
      const BohrSeries v = load_series(dk_args);
      const BohrSeries w = series_from_json(load_json_file(dk_series2), v.spec());
      Json out;
      if (dk_inf) {
        out = Json{{"k", "inf"}, {"distance", dinf_distance(v, w)}};
      } else {
        out = Json{{"k", dk_k}, {"distance", dk_distance(v, w, dk_k)}};
      }
      emit(dk_args, out.dump(2) + "\n");
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ToleranceError& e) {
    std::cerr << "tolerance error: " << e.what() << "\n";
    return 4;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
