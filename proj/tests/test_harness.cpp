#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

#include "rffdq/error.hpp"
#include "rffdq/harness.hpp"

using namespace rffdq;
using nlohmann::json;
using doctest::Approx;

namespace {

json line_encoding(int kmax) {
  json gates = json::array();
  for (int k = 0; k < kmax; ++k) gates.push_back({-0.5, 0.5});
  return {{"dimensions", {gates}}};
}

json cosine_problem(double sigma, std::size_t n) {
  return {{"encoding", line_encoding(4)},
          {"target", {{"kind", "explicit"}, {"function", {{"d", 1}, {"terms", {{{"omega", {1}}, {"re", 0.5}, {"im", 0}}}}}}}},
          {"noise", {{"kind", sigma > 0 ? "uniform" : "none"}, {"sigma", sigma}}},
          {"n", n},
          {"seed", 11}};
}

json small_sweep() {
  return {{"schema_version", 1},
          {"problem", cosine_problem(0.1, 60)},
          {"axes",
           {{"dist", {{{"kind", "uniform"}, {"label", "uniform"}},
                      {{"kind", "explicit"}, {"p", {0.1, 0.6, 0.1, 0.1, 0.1}}, {"label", "aligned"}}}},
            {"M", {5, 40}},
            {"lambda", {"auto", 1e-3}},
            {"seed", {1, 2, 3}}}},
          {"krr", true},
          {"master_seed", 99}};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rffdq_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("generated problems") {
  auto spec = problem_from_json(cosine_problem(0.0, 10));
  auto gp = generate_problem(spec);
  REQUIRE(gp.data.size() == 10);
  for (std::size_t k = 0; k < 10; ++k) CHECK(gp.data.Y(k) == Approx(std::cos(gp.data.X(k, 0))).epsilon(1e-14));
  CHECK(gp.data.b_bound >= gp.data.Y.cwiseAbs().maxCoeff());

  auto again = generate_problem(spec);
  CHECK((again.data.X.array() == gp.data.X.array()).all());
  CHECK((again.data.Y.array() == gp.data.Y.array()).all());

  auto noisy = generate_problem(problem_from_json(cosine_problem(0.1, 10000)));
  CHECK(noisy.noise_variance == Approx(0.01));
  Eigen::VectorXd resid(10000);
  for (Eigen::Index k = 0; k < 10000; ++k) resid(k) = noisy.data.Y(k) - std::cos(noisy.data.X(k, 0));
  const double var = (resid.array() - resid.mean()).square().mean();
  CHECK(std::abs(var - 0.01) <= 0.25 * 0.01);
  CHECK(resid.cwiseAbs().maxCoeff() <= 0.1 * std::sqrt(3.0));
  CHECK(noisy.data.b_bound >= noisy.data.Y.cwiseAbs().maxCoeff());
}

TEST_CASE("random and circuit targets") {
  json random = {{"encoding", line_encoding(3)}, {"target", {{"kind", "random"}, {"support", 3}, {"seed", 5}}}, {"n", 20}};
  auto a = materialize_target(problem_from_json(random));
  CHECK(a.support().size() == 3);
  auto b = materialize_target(problem_from_json(random));
  CHECK(a.coeffs() == b.coeffs());
  for (auto c : a.coeffs()) CHECK((std::abs(c.real()) <= 1 && std::abs(c.imag()) <= 1));

  random["target"]["support"] = 99;
  CHECK_THROWS_AS(materialize_target(problem_from_json(random)), Error);

  json circuit = {{"target",
                   {{"kind", "circuit"},
                    {"circuit",
                     {{"qubits", 1},
                      {"gates", {{{"kind", "encode"}, {"pauli", "X"}, {"scale", 0.5}, {"dim", 1}}}},
                      {"observable", {{"terms", {{{"coef", 1.0}, {"pauli", "Z"}}}}}}}}}},
                  {"n", 5}};
  auto spec = problem_from_json(circuit);
  auto gp = generate_problem(spec);
  CHECK(std::abs(gp.target.coeff(1) - 0.5) <= 1e-10);
  for (std::size_t k = 0; k < 5; ++k) CHECK(gp.data.Y(k) == Approx(std::cos(gp.data.X(k, 0))));

  json off = cosine_problem(0, 5);
  off["target"]["function"]["terms"][0]["omega"] = {7};
  CHECK_THROWS_AS(problem_from_json(off), Error);
}

TEST_CASE("sweep shape and KRR oracle") {
  json noiseless = small_sweep();
  noiseless["problem"] = cosine_problem(0.0, 60);
  noiseless["axes"]["lambda"] = {1e-6, 1e-8};
  auto cfg = sweep_from_json(noiseless);
  CHECK(cell_count(cfg) == 2 * 2 * 2 * 3);
  auto rows = run_sweep(cfg, RunOptions{2});
  REQUIRE(rows.size() == 24);
  std::set<std::string> ids;
  for (const auto& r : rows) {
    CHECK(r.status == "ok");
    ids.insert(r.experiment_id);
    CHECK(std::isfinite(r.krr_true_risk));
    CHECK(r.risk_gap == Approx(r.true_risk - r.krr_true_risk));
    CHECK(r.risk_gap >= -1e-6);
    CHECK(r.runtime_ms == 0.0);
    CHECK(r.d == 1);
    CHECK(r.omega_size == 5);
  }
  CHECK(ids.size() == 24);
  CHECK(rows.front().experiment_id == "uniform-M5-n60-l1e-06-s1");

  json two = small_sweep();
  two["axes"]["dist"] = {{{"kind", "uniform"}}};
  two["axes"]["M"] = {3, 9};
  two["axes"].erase("lambda");
  two["krr"] = false;
  auto six = run_sweep(sweep_from_json(two));
  CHECK(six.size() == 6);
  for (const auto& r : six) CHECK(std::isnan(r.krr_true_risk));
}

TEST_CASE("sweeps are independent of worker count") {
  auto cfg = sweep_from_json(small_sweep());
  auto one = run_sweep(cfg, RunOptions{1});
  auto many = run_sweep(cfg, RunOptions{4});
  REQUIRE(one.size() == many.size());
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(row_to_csv(one[i]) == row_to_csv(many[i]));
}

TEST_CASE("resume after interruption gives the uninterrupted table") {
  auto cfg = sweep_from_json(small_sweep());
  const auto full = temp_path("full.csv"), part = temp_path("part.csv");
  std::filesystem::remove(full);
  std::filesystem::remove(part);
  run_sweep(cfg, full.string(), RunOptions{3});

  RunOptions stop{2};
  stop.stop_after = 7;
  auto first = run_sweep(cfg, part.string(), stop);
  CHECK(first.size() == 7);
  {
    std::ofstream torn(part, std::ios::app | std::ios::binary);
    torn << "aligned-M40-n60-l0.001-s2,1,5,expl";
  }
  RunOptions resume{3};
  resume.resume = true;
  auto rest = run_sweep(cfg, part.string(), resume);
  CHECK(rest.size() == 24);
  CHECK(slurp(part) == slurp(full));

  auto parsed = results_from_csv(slurp(full));
  CHECK(parsed.size() == 24);
  CHECK(row_to_csv(parsed[5]) == row_to_csv(run_cell(cfg, 5)));
  std::filesystem::remove(full);
  std::filesystem::remove(part);
}

TEST_CASE("results CSV layout") {
  const auto header = results_header();
  CHECK(header.rfind("# rffdq results schema_version=1\n", 0) == 0);
  CHECK(header.find("experiment_id,d,omega_size,dist_kind,M,n,lambda,seed,emp_risk,true_risk,krr_true_risk,risk_gap,"
                    "l2_err_sq,rel_l2_err,alignment,p_max,runtime_ms,status") != std::string::npos);
  ResultRow r;
  r.experiment_id = "x";
  r.krr_true_risk = std::nan("");
  CHECK(row_to_csv(r).find(",nan,") != std::string::npos);
}

TEST_CASE("per-cell failures are recorded in the row") {
  json cfg = small_sweep();
  cfg["axes"]["lambda"] = {0};
  cfg["axes"]["M"] = {40};
  cfg["problem"]["n"] = 3;
  auto rows = run_sweep(sweep_from_json(cfg));
  REQUIRE_FALSE(rows.empty());
  bool any_error = false;
  for (const auto& r : rows) any_error = any_error || r.status.rfind("error:", 0) == 0;
  CHECK(any_error);
}

TEST_CASE("sweep config validation") {
  json bad = small_sweep();
  bad["schema_version"] = 2;
  CHECK_THROWS_AS(sweep_from_json(bad), Error);
  bad = small_sweep();
  bad["axes"]["dist"][1]["label"] = "uniform";
  CHECK_THROWS_AS(sweep_from_json(bad), Error);
  bad = small_sweep();
  bad["axes"]["M"] = json::array();
  CHECK_THROWS_AS(sweep_from_json(bad), Error);
  bad = small_sweep();
  bad["axes"]["lambda"] = {"often"};
  CHECK_THROWS_AS(sweep_from_json(bad), Error);
}

TEST_CASE("plots") {
  CHECK_THROWS_AS(plot_kind_from_name("pie"), Error);
  CHECK(plot_kind_from_name("risk_vs_M") == PlotKind::RiskVsM);
  CHECK_THROWS_AS(emit_plot({}, PlotKind::RiskVsM), Error);

  ResultRow r;
  r.experiment_id = "one";
  r.dist_kind = "uniform";
  r.M = 10;
  r.n = 100;
  r.true_risk = 0.2;
  r.alignment = 0.1;
  r.rel_l2_err = 0.3;
  const auto single = emit_plot({r}, PlotKind::RiskVsM);
  CHECK(single.rfind("<svg", 0) == 0);
  CHECK(single.find("<polygon") == std::string::npos);
  CHECK(single.find("<polyline") == std::string::npos);
  std::size_t circles = 0;
  for (std::size_t pos = 0; (pos = single.find("<circle", pos)) != std::string::npos; ++pos) ++circles;
  CHECK(circles == 1);

  auto rows = run_sweep(sweep_from_json(small_sweep()));
  for (auto kind : {PlotKind::RiskVsM, PlotKind::RiskVsN, PlotKind::AlignmentScatter}) {
    const auto svg = emit_plot(rows, kind);
    CHECK(svg == emit_plot(rows, kind));
    CHECK(svg.find("</svg>") != std::string::npos);
  }
}

TEST_CASE("median risk falls with M on a convergence sweep") {
  json cfg = {{"schema_version", 1},
              {"problem", cosine_problem(0.0, 100)},
              {"axes",
               {{"dist", {{{"kind", "uniform"}, {"label", "uniform"}}}},
                {"M", {2, 10, 50, 250}},
                {"lambda", {1e-4}},
                {"seed", {1, 2, 3, 4, 5, 6, 7, 8, 9}}}},
              {"master_seed", 4}};
  auto rows = run_sweep(sweep_from_json(cfg));
  std::map<std::size_t, std::vector<double>> by_m;
  for (const auto& r : rows) by_m[r.M].push_back(r.true_risk);
  double prev = std::numeric_limits<double>::infinity();
  for (auto& [m, v] : by_m) {
    std::sort(v.begin(), v.end());
    const double med = v[v.size() / 2];
    CHECK(med <= prev);
    prev = med;
  }
  CHECK(emit_plot(rows, PlotKind::RiskVsM).find("<polyline") != std::string::npos);
}
