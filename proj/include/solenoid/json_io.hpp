#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "solenoid/classify.hpp"
#include "solenoid/flows.hpp"

namespace solenoid {

using Json = nlohmann::json;

// Shape problems raise ParseError (exit 2 in the CLI); value problems raise
// DomainError (exit 3) from the underlying constructors.

Json to_json(const SolenoidSpec& spec);  // {"factors": [...]}
SpecPtr spec_from_json(const Json& j);

Json to_json(const SolenoidPoint& x);  // {"angles": ["1/2", ...]}
SolenoidPoint point_from_json(SpecPtr spec, const Json& j);

/// {"spec": {...}, "real": bool, "coefficients": [{"level","m","re","im"}],
///  "tail": null | {"kind": "rho"|"geometric_level", ...}}
Json to_json(const BohrSeries& f);
BohrSeries series_from_json(const Json& j, SpecPtr fallback_spec = nullptr);

Json to_json(const APReport& report);
Json to_json(const OpennessReport& report);
Json conjugacy_report_json(const ConjugacyData& data);
/// Per-sample reports plus aggregate rates; thread count deliberately
/// excluded so summaries compare byte-identically across runs.
Json to_json(const ExperimentSummary& summary);

const char* to_string(TailPart part);
TailPart tail_part_from_string(const std::string& s);

/// Full-precision decimal (17 significant digits), '.' decimal point.
std::string format_double(double x);

void write_eval_csv(std::ostream& os, const BohrSeries& f, const std::vector<double>& times,
                    double tol);
void write_trajectory_csv(std::ostream& os, const GeneratedFlow& flow, const SolenoidPoint& x,
                          const std::vector<double>& times);
void write_integral_curve_csv(std::ostream& os, const std::vector<IntegralPoint>& points);

Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace solenoid
