#include "solenoid/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace solenoid {

namespace {

const Json& expect(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(std::string("missing key '") + key + "'");
  return j.at(key);
}

double expect_number(const Json& j, const char* key) {
  const Json& v = expect(j, key);
  if (!v.is_number()) throw ParseError(std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

long long expect_int(const Json& j, const char* key) {
  const Json& v = expect(j, key);
  if (!v.is_number_integer())
    throw ParseError(std::string("key '") + key + "' must be an integer");
  return v.get<long long>();
}

}  // namespace

Json to_json(const SolenoidSpec& spec) { return Json{{"factors", spec.factors()}}; }

SpecPtr spec_from_json(const Json& j) {
  const Json& factors = expect(j, "factors");
  if (!factors.is_array() || factors.empty())
    throw ParseError("'factors' must be a non-empty array");
  std::vector<int> list;
  list.reserve(factors.size());
  for (const Json& f : factors) {
    if (!f.is_number_integer()) throw ParseError("'factors' entries must be integers");
    list.push_back(f.get<int>());
  }
  return make_spec(std::move(list));
}

Json to_json(const SolenoidPoint& x) {
  Json angles = Json::array();
  for (int j = 1; j <= x.depth(); ++j) angles.push_back(format_rational(x.angle(j)));
  return Json{{"angles", angles}};
}

SolenoidPoint point_from_json(SpecPtr spec, const Json& j) {
  const Json& angles = expect(j, "angles");
  if (!angles.is_array() || angles.empty())
    throw ParseError("'angles' must be a non-empty array");
  std::vector<Rational> list;
  list.reserve(angles.size());
  for (const Json& a : angles) {
    if (a.is_string())
      list.push_back(parse_rational(a.get<std::string>()));
    else if (a.is_number())
      list.push_back(rational_of(a.get<double>()));
    else
      throw ParseError("'angles' entries must be strings or numbers");
  }
  return SolenoidPoint::from_angles(std::move(spec), std::move(list));
}

const char* to_string(TailPart part) {
  switch (part) {
    case TailPart::full: return "full";
    case TailPart::real_part: return "real";
    case TailPart::imaginary_part: return "imaginary";
  }
  return "?";
}

TailPart tail_part_from_string(const std::string& s) {
  if (s == "full") return TailPart::full;
  if (s == "real") return TailPart::real_part;
  if (s == "imaginary") return TailPart::imaginary_part;
  throw ParseError("unknown tail part '" + s + "'");
}

Json to_json(const BohrSeries& f) {
  Json coeffs = Json::array();
  for (const auto& [r, c] : f.coefficients())
    coeffs.push_back(Json{{"level", r.level}, {"m", r.m}, {"re", c.real()}, {"im", c.imag()}});
  Json tail;
  if (f.tail()) {
    const TailSpec& t = *f.tail();
    if (t.ratio == 1.0) {
      tail = Json{{"kind", "rho"},
                  {"start_level", t.start_level},
                  {"scale_re", t.scale.real()},
                  {"scale_im", t.scale.imag()},
                  {"part", to_string(t.part)}};
      if (t.power != 1) tail["power"] = t.power;
    } else {
      tail = Json{{"kind", "geometric_level"},
                  {"start_level", t.start_level},
                  {"base_re", t.scale.real()},
                  {"base_im", t.scale.imag()},
                  {"ratio", t.ratio},
                  {"part", to_string(t.part)}};
      if (t.power != 0) tail["power"] = t.power;
    }
  }
  return Json{{"spec", to_json(*f.spec())},
              {"real", f.real_valued()},
              {"coefficients", coeffs},
              {"tail", tail}};
}

BohrSeries series_from_json(const Json& j, SpecPtr fallback_spec) {
  if (!j.is_object()) throw ParseError("series must be a JSON object");
  SpecPtr spec;
  if (j.contains("spec") && !j.at("spec").is_null())
    spec = spec_from_json(j.at("spec"));
  else
    spec = std::move(fallback_spec);
  if (!spec) throw ParseError("series carries no 'spec' and no --spec file was given");

  BohrSeries out(spec, j.value("real", true));
  if (j.contains("coefficients")) {
    const Json& coeffs = j.at("coefficients");
    if (!coeffs.is_array()) throw ParseError("'coefficients' must be an array");
    for (const Json& c : coeffs) {
      if (!c.is_object()) throw ParseError("coefficient entries must be objects");
      const int level = static_cast<int>(expect_int(c, "level"));
      const long long m = expect_int(c, "m");
      out.merge_coefficient(level, m, {c.value("re", 0.0), c.value("im", 0.0)});
    }
  }
  if (j.contains("tail") && !j.at("tail").is_null()) {
    const Json& t = j.at("tail");
    const Json& kind_v = expect(t, "kind");
    if (!kind_v.is_string()) throw ParseError("tail 'kind' must be a string");
    const std::string kind = kind_v.get<std::string>();
    const int start = static_cast<int>(expect_int(t, "start_level"));
    const TailPart part = tail_part_from_string(t.value("part", std::string("full")));
    TailSpec tail;
    if (kind == "rho") {
      tail = TailSpec::rho(start, {t.value("scale_re", 0.0), t.value("scale_im", 0.0)}, part);
      tail.power = t.value("power", 1);
    } else if (kind == "geometric_level") {
      tail = TailSpec::geometric(start, {t.value("base_re", 0.0), t.value("base_im", 0.0)},
                                 expect_number(t, "ratio"), part);
      tail.power = t.value("power", 0);
    } else {
      throw ParseError("unknown tail kind '" + kind + "'");
    }
    out.set_tail(tail);
  }
  if (out.real_valued()) out.check_real_invariant();
  return out;
}

Json to_json(const APReport& report) {
  Json crossings = Json::object();
  for (const auto& [n, T] : report.crossings) crossings[std::to_string(n)] = T;
  return Json{{"verdict", to_string(report.verdict)},
              {"method", to_string(report.method)},
              {"sup_integral", report.sup_integral},
              {"crossings", crossings},
              {"bound", report.bound ? Json(*report.bound) : Json(nullptr)}};
}

Json to_json(const OpennessReport& r) {
  return Json{{"n", r.n},           {"T_n", r.T_n},
              {"margin", r.margin}, {"radius", r.radius},
              {"trials", r.trials}, {"in_un", r.in_un},
              {"aux_holds", r.aux_holds}, {"passed", r.passed}};
}

Json conjugacy_report_json(const ConjugacyData& data) {
  Json delta = Json::array();
  for (const auto& [r, c] : data.delta.coefficients())
    delta.push_back(Json{{"level", r.level}, {"m", r.m}, {"re", c.real()}, {"im", c.imag()}});
  return Json{{"alpha", data.alpha},
              {"lambda0", 1.0 / data.alpha},
              {"delta_coefficients", delta},
              {"residual", data.residual},
              {"reciprocal_error", data.reciprocal_error},
              {"grid", Json{{"nt", data.options.grid_t},
                            {"nx", data.options.grid_x},
                            {"t_min", data.options.t_min},
                            {"t_max", data.options.t_max},
                            {"depth", data.options.depth}}}};
}

Json to_json(const ExperimentSummary& summary) {
  const ExperimentConfig& cfg = summary.config;
  Json results = Json::array();
  int ap = 0;
  std::vector<int> non_ap(cfg.epsilons.size(), 0);
  std::vector<double> m_sum(cfg.epsilons.size(), 0.0);
  // crossing stats per epsilon and per n: count/min/max/sum in index order
  struct Stat {
    int count = 0;
    double min = 0.0, max = 0.0, sum = 0.0;
  };
  std::vector<std::map<int, Stat>> stats(cfg.epsilons.size());

  for (const SampleResult& s : summary.results) {
    if (s.classification.verdict == Verdict::almost_periodic) ++ap;
    Json perturbations = Json::array();
    for (size_t e = 0; e < s.perturbations.size(); ++e) {
      const PerturbationOutcome& p = s.perturbations[e];
      if (p.report.verdict == Verdict::not_almost_periodic) ++non_ap[e];
      m_sum[e] += p.m;
      for (const auto& [n, T] : p.report.crossings) {
        Stat& st = stats[e][n];
        if (st.count == 0) {
          st.min = st.max = T;
        } else {
          st.min = std::min(st.min, T);
          st.max = std::max(st.max, T);
        }
        ++st.count;
        st.sum += T;
      }
      perturbations.push_back(Json{{"epsilon", p.epsilon},
                                   {"m", p.m},
                                   {"part", to_string(p.part)},
                                   {"d1", p.d1},
                                   {"success", p.success},
                                   {"report", to_json(p.report)}});
    }
    results.push_back(Json{{"index", s.index},
                           {"classification", to_json(s.classification)},
                           {"perturbations", perturbations}});
  }

  const double n_samples = static_cast<double>(summary.results.size());
  Json agg_perturbations = Json::array();
  for (size_t e = 0; e < cfg.epsilons.size(); ++e) {
    Json crossings = Json::object();
    for (const auto& [n, st] : stats[e])
      crossings[std::to_string(n)] = Json{{"count", st.count},
                                          {"min", st.min},
                                          {"max", st.max},
                                          {"mean", st.sum / st.count}};
    agg_perturbations.push_back(Json{{"epsilon", cfg.epsilons[e]},
                                     {"not_almost_periodic_rate", non_ap[e] / n_samples},
                                     {"mean_m", m_sum[e] / n_samples},
                                     {"crossings", crossings}});
  }

  return Json{{"samples", cfg.samples},
              {"seed", cfg.seed},
              {"epsilons", cfg.epsilons},
              {"n_max", cfg.n_max},
              {"t_max", cfg.T_max},
              {"max_level", cfg.max_level},
              {"results", results},
              {"aggregate", Json{{"almost_periodic_rate", ap / n_samples},
                                 {"perturbations", agg_perturbations}}}};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_eval_csv(std::ostream& os, const BohrSeries& f, const std::vector<double>& times,
                    double tol) {
  os << "t,re,im,trunc_bound\n";
  for (double t : times) {
    const EvalResult r = evaluate_at_time(f, t, tol);
    os << format_double(t) << ',' << format_double(r.value.real()) << ','
       << format_double(r.value.imag()) << ',' << format_double(r.tail_bound) << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const GeneratedFlow& flow, const SolenoidPoint& x,
                          const std::vector<double>& times) {
  os << "t,s";
  for (int j = 1; j <= x.depth(); ++j) os << ",angle_" << j;
  os << '\n';
  const std::vector<double> arcs = flow_arc_samples(flow, x, times);
  for (size_t i = 0; i < times.size(); ++i) {
    const SolenoidPoint p = add(x, pi_N(x.spec(), arcs[i], x.depth()));
    os << format_double(times[i]) << ',' << format_double(arcs[i]);
    for (int j = 1; j <= p.depth(); ++j) os << ',' << format_double(p.angle_real(j));
    os << '\n';
  }
}

void write_integral_curve_csv(std::ostream& os, const std::vector<IntegralPoint>& points) {
  os << "T,I_real,I_imag,truncation_bound\n";
  for (const IntegralPoint& p : points)
    os << format_double(p.T) << ',' << format_double(p.value.real()) << ','
       << format_double(p.value.imag()) << ',' << format_double(p.truncation_bound) << '\n';
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << content;
}

}  // namespace solenoid
