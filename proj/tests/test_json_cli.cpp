#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "solenoid/json_io.hpp"
#include "support/builders.hpp"

using namespace solenoid;
using builders::cosine_field;
using builders::dyadic;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("solenoid_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path p = work_dir() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SOLENOID_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("json round trips") {
  SUBCASE("spec") {
    const auto spec = make_spec({2, 3, 2});
    const auto back = spec_from_json(to_json(*spec));
    CHECK(*back == *spec);
    CHECK_THROWS_AS(spec_from_json(Json{{"factors", Json::array()}}), ParseError);
    CHECK_THROWS_AS(spec_from_json(Json{{"wrong", 1}}), ParseError);
    CHECK_THROWS_AS(spec_from_json(Json{{"factors", {2, 1}}}), DomainError);
  }

  SUBCASE("points, including exact rational angles") {
    const auto spec = make_spec({2, 2});
    const SolenoidPoint x = pi_N(spec, Rational(1), 3);
    const SolenoidPoint back = point_from_json(spec, to_json(x));
    CHECK(metric(x, back).value == 0.0);
    CHECK(to_json(x)["angles"][1] == "1/2");
    // float angles are accepted within the compatibility tolerance
    const SolenoidPoint y =
        point_from_json(spec, Json{{"angles", {0.5, 0.75, 0.375}}});
    CHECK(y.depth() == 3);
    CHECK_THROWS_AS(point_from_json(spec, Json{{"angles", {0.5, 0.1, 0.0}}}), DomainError);
  }

  SUBCASE("series with tails") {
    const auto spec = dyadic(4);
    BohrSeries f = cosine_field(spec, 2, 3, 0.8, 1.5);
    f.set_tail(TailSpec::rho(2, {0.25, 0.0}, TailPart::imaginary_part));
    const BohrSeries back = series_from_json(to_json(f));
    CHECK(back.real_valued());
    CHECK(back.coefficients() == f.coefficients());
    REQUIRE(back.tail().has_value());
    CHECK(back.tail()->same_shape(*f.tail()));
    CHECK(back.tail()->scale == f.tail()->scale);

    BohrSeries g(spec, false);
    g.set_coefficient(1, 1, {0.3, -0.2});
    g.set_tail(TailSpec::geometric(1, {1.0, 0.5}, 0.25));
    const BohrSeries gback = series_from_json(to_json(g));
    CHECK(gback.coefficients() == g.coefficients());
    CHECK(gback.tail()->ratio == 0.25);

    // a real-flagged series with asymmetric coefficients is rejected
    Json bad = to_json(f);
    bad["coefficients"].push_back(Json{{"level", 1}, {"m", 1}, {"re", 0.1}, {"im", 0.2}});
    CHECK_THROWS_AS(series_from_json(bad), DomainError);
  }

  SUBCASE("derivative round trips through the power field") {
    const auto spec = dyadic(4);
    BohrSeries f(spec, true);
    f.set_tail(TailSpec::rho(1, {1.0, 0.0}, TailPart::imaginary_part));
    const BohrSeries d = derivative(f);
    const BohrSeries back = series_from_json(to_json(d));
    CHECK(back.tail()->power == 2);
    CHECK(back.tail()->same_shape(*d.tail()));
  }

  SUBCASE("APReport shape") {
    APReport rep;
    rep.verdict = Verdict::not_almost_periodic;
    rep.method = Method::analytic_parseval;
    rep.sup_integral = 2.5;
    rep.crossings[1] = 5.33;
    const Json j = to_json(rep);
    CHECK(j["verdict"] == "not_almost_periodic");
    CHECK(j["method"] == "analytic_parseval");
    CHECK(j["crossings"]["1"] == 5.33);
    CHECK(j["bound"].is_null());
  }
}

TEST_CASE("cli") {
  const auto spec22 = dyadic(2);
  const fs::path spec_file = write_file("spec22.json", to_json(*spec22).dump());

  const fs::path const_series =
      write_file("const.json", to_json(BohrSeries::constant(spec22, {3.5, 0.0})).dump());

  BohrSeries rho2(spec22, false);
  rho2.set_tail(TailSpec::rho(2, {1.0, 0.0}, TailPart::full));
  const fs::path rho2_file = write_file("rho2.json", to_json(rho2).dump());

  SUBCASE("eval: constant column and deterministic output") {
    const fs::path out = work_dir() / "eval_const.csv";
    REQUIRE(run_cli("eval --series " + const_series.string() + " --t-start 0 --t-end 1"
                    " --t-steps 11 --out " + out.string()) == 0);
    const auto rows = parse_csv(read_file(out));
    REQUIRE(rows.size() == 12);  // header + 11
    CHECK(rows[0][0] == "t");
    for (size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) == 3.5);

    const fs::path out2 = work_dir() / "eval_const_2.csv";
    REQUIRE(run_cli("eval --series " + const_series.string() + " --t-start 0 --t-end 1"
                    " --t-steps 11 --out " + out2.string()) == 0);
    CHECK(read_file(out) == read_file(out2));
  }

  SUBCASE("eval: rho_2 stays within 1/2") {
    const fs::path out = work_dir() / "eval_rho2.csv";
    REQUIRE(run_cli("eval --series " + rho2_file.string() +
                    " --t-start -20 --t-end 20 --t-steps 101 --out " + out.string()) == 0);
    const auto rows = parse_csv(read_file(out));
    for (size_t i = 1; i < rows.size(); ++i) {
      const double re = std::stod(rows[i][1]), im = std::stod(rows[i][2]);
      CHECK(std::hypot(re, im) <= 0.5 + 1e-9);
    }
  }

  SUBCASE("classify exit codes") {
    CHECK(run_cli("classify --series " + const_series.string()) == 0);

    const fs::path im_rho = write_file(
        "imrho.json",
        to_json(add(BohrSeries::constant(spec22, {1.0, 0.0}),
                    make_rho(spec22, 1, TailPart::imaginary_part, 1.0)))
            .dump());
    CHECK(run_cli("classify --series " + im_rho.string() + " --t-max 1000 --n-max 2") == 10);

    const auto spec1 = dyadic(1);
    BohrSeries boundary = BohrSeries::constant(spec1, {1.0, 0.0});
    boundary.set_tail(TailSpec::geometric(1, {0.05, 0.0}, 0.5, TailPart::real_part));
    const fs::path boundary_file = write_file("boundary.json", to_json(boundary).dump());
    CHECK(run_cli("classify --series " + boundary_file.string() + " --t-max 50 --n-max 3") == 11);
  }

  SUBCASE("parse and domain failures") {
    const fs::path broken = write_file("broken.json", "{ not json");
    CHECK(run_cli("classify --series " + broken.string()) == 2);

    const fs::path bad_spec = write_file("bad_spec.json", R"({"factors": [1]})");
    const fs::path series_no_spec =
        write_file("no_spec.json", R"({"real": true, "coefficients": []})");
    CHECK(run_cli("classify --series " + series_no_spec.string() + " --spec " +
                  bad_spec.string()) == 3);
  }

  SUBCASE("conjugate: constant field and tolerance gate") {
    const fs::path out = work_dir() / "conj.json";
    REQUIRE(run_cli("conjugate --series " + const_series.string() + " --out " + out.string()) ==
            0);
    const Json rep = Json::parse(read_file(out));
    CHECK(rep["residual"].get<double>() < 1e-10);
    CHECK(rep["alpha"].get<double>() == doctest::Approx(3.5).epsilon(1e-9));

    const fs::path osc = write_file(
        "osc.json", to_json(cosine_field(spec22, 1, 1, 0.5, 1.0)).dump());
    CHECK(run_cli("conjugate --series " + osc.string() + " --grid-t 6 --grid-x 4 --tol 1e-18") ==
          4);
  }

  SUBCASE("integral-curve reproduces the 3k/(4 pi) table") {
    const fs::path im_rho = write_file(
        "imrho_curve.json",
        to_json(add(BohrSeries::constant(spec22, {1.0, 0.0}),
                    make_rho(spec22, 1, TailPart::imaginary_part, 1.0)))
            .dump());
    const fs::path out = work_dir() / "curve.csv";
    REQUIRE(run_cli("integral-curve --series " + im_rho.string() +
                    " --times 32/3,128/3,512/3 --out " + out.string()) == 0);
    const auto rows = parse_csv(read_file(out));
    REQUIRE(rows.size() == 4);
    const int ks[] = {5, 7, 9};
    for (int i = 0; i < 3; ++i) {
      const double I = std::stod(rows[static_cast<size_t>(i + 1)][1]);
      CHECK(std::abs(I - 3.0 * ks[i] / (4.0 * M_PI)) < 0.2);
    }
  }

  SUBCASE("return-time emits a series document") {
    const fs::path out = work_dir() / "tau.json";
    REQUIRE(run_cli("return-time --series " + const_series.string() + " --out " + out.string()) ==
            0);
    const BohrSeries tau = series_from_json(Json::parse(read_file(out)));
    CHECK(tau.coefficients().size() == 1);
    CHECK(tau.coefficient(0, 0).real() == doctest::Approx(3.5));
  }

  SUBCASE("perturb") {
    const fs::path out = work_dir() / "perturb.json";
    REQUIRE(run_cli("perturb --series " + const_series.string() + " --epsilon 1e-2 --out " +
                    out.string()) == 0);
    const Json rep = Json::parse(read_file(out));
    CHECK(rep["success"] == true);
    CHECK(rep["report"]["verdict"] == "not_almost_periodic");
    CHECK(rep["d1"].get<double>() <= 1e-2);
    // the emitted series parses back
    const BohrSeries perturbed = series_from_json(rep["series"]);
    CHECK(perturbed.tail().has_value());
  }

  SUBCASE("dk") {
    const fs::path a = write_file("dk_a.json",
                                  to_json(BohrSeries::constant(spec22, {2.0, 0.0})).dump());
    const fs::path b = write_file("dk_b.json",
                                  to_json(BohrSeries::constant(spec22, {3.0, 0.0})).dump());
    const fs::path out = work_dir() / "dk.json";
    REQUIRE(run_cli("dk --series " + a.string() + " --series2 " + b.string() + " --k 2 --out " +
                    out.string()) == 0);
    CHECK(Json::parse(read_file(out))["distance"].get<double>() == doctest::Approx(1.0));
  }

  SUBCASE("flow trajectory of a constant field") {
    const fs::path out = work_dir() / "traj.csv";
    REQUIRE(run_cli("flow --series " + const_series.string() +
                    " --time 2 --rows 5 --out " + out.string()) == 0);
    const auto rows = parse_csv(read_file(out));
    REQUIRE(rows.size() == 6);
    CHECK(rows[0][0] == "t");
    CHECK(rows[0][2] == "angle_1");
    for (size_t i = 1; i < rows.size(); ++i) {
      const double t = std::stod(rows[i][0]);
      const double s = std::stod(rows[i][1]);
      CHECK(std::abs(s - 3.5 * t) < 1e-9);  // ds/du = v = 3.5
      const double angle = std::stod(rows[i][2]);
      CHECK(std::abs(angle - (s - std::floor(s))) < 1e-9);
    }
  }

  SUBCASE("flow accepts a start point file; series may borrow --spec") {
    BohrSeries v(spec22, true);  // no embedded spec in the JSON below
    v.set_coefficient(0, 0, 2.0);
    Json series_json = to_json(v);
    series_json.erase("spec");
    const fs::path series_file = write_file("spec_less.json", series_json.dump());
    const fs::path point_file =
        write_file("start.json", to_json(pi_N(spec22, Rational(1, 3), 3)).dump());

    const fs::path out = work_dir() / "traj_point.csv";
    REQUIRE(run_cli("flow --series " + series_file.string() + " --spec " + spec_file.string() +
                    " --point " + point_file.string() + " --time 1 --rows 3 --out " +
                    out.string()) == 0);
    const auto rows = parse_csv(read_file(out));
    REQUIRE(rows.size() == 4);
    CHECK(std::stod(rows[1][2]) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // without --spec the spec-less series is a parse error
    CHECK(run_cli("classify --series " + series_file.string()) == 2);
  }

  SUBCASE("experiment is byte-identical across thread counts") {
    const fs::path out1 = work_dir() / "exp1.json";
    const fs::path out2 = work_dir() / "exp2.json";
    REQUIRE(run_cli("experiment --spec " + spec_file.string() +
                    " --samples 6 --seed 3 --epsilons 1e-2 --threads 1 --out " +
                    out1.string()) == 0);
    REQUIRE(run_cli("experiment --spec " + spec_file.string() +
                    " --samples 6 --seed 3 --epsilons 1e-2 --threads 3 --out " +
                    out2.string()) == 0);
    CHECK(read_file(out1) == read_file(out2));
    const Json summary = Json::parse(read_file(out1));
    CHECK(summary["aggregate"]["almost_periodic_rate"] == 1.0);
    CHECK(summary["aggregate"]["perturbations"][0]["not_almost_periodic_rate"] == 1.0);
    const Json& stats = summary["aggregate"]["perturbations"][0]["crossings"];
    REQUIRE(stats.contains("1"));
    CHECK(stats["1"]["count"] == 6);
    CHECK(stats["1"]["min"].get<double>() <= stats["1"]["mean"].get<double>());
    CHECK(stats["1"]["mean"].get<double>() <= stats["1"]["max"].get<double>());

    // SOLENOID_LAB_THREADS is the fallback for --threads
    const fs::path out3 = work_dir() / "exp3.json";
    const std::string cmd = "SOLENOID_LAB_THREADS=2 " + std::string(SOLENOID_CLI_PATH) +
                            " experiment --spec " + spec_file.string() +
                            " --samples 6 --seed 3 --epsilons 1e-2 --out " + out3.string() +
                            " > /dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(read_file(out1) == read_file(out3));
  }
}
