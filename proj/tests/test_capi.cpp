#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <string>

#include "rffdq/rffdq.h"

namespace {

const char* kLine = R"({"dimensions": [[[-0.5, 0.5], [-0.5, 0.5]]]})";

std::string take(char* s) {
  std::string out = s ? s : "";
  rffdq_string_free(s);
  return out;
}

struct FreqsetDeleter {
  void operator()(rffdq_freqset* p) const { rffdq_freqset_free(p); }
};
struct DistDeleter {
  void operator()(rffdq_distribution* p) const { rffdq_distribution_free(p); }
};
struct DataDeleter {
  void operator()(rffdq_dataset* p) const { rffdq_dataset_free(p); }
};
struct ModelDeleter {
  void operator()(rffdq_model* p) const { rffdq_model_free(p); }
};

std::unique_ptr<rffdq_freqset, FreqsetDeleter> make_freqset(const char* enc) {
  rffdq_freqset* fs = nullptr;
  REQUIRE(rffdq_freqset_create(enc, 1, &fs) == RFFDQ_OK);
  return std::unique_ptr<rffdq_freqset, FreqsetDeleter>(fs);
}

}  // namespace

TEST_CASE("version and errors") {
  CHECK(std::string(rffdq_version()).size() > 0);
  rffdq_freqset* fs = nullptr;
  CHECK(rffdq_freqset_create("{broken", 1, &fs) == RFFDQ_ERR_CONFIG);
  CHECK(fs == nullptr);
  CHECK(std::string(rffdq_last_error()).size() > 0);
  CHECK(rffdq_freqset_create(kLine, 1, nullptr) == RFFDQ_ERR_CONFIG);
  CHECK(rffdq_bounds_sufficient(0.9, 1, 1, 0.1, 0.1, nullptr) != RFFDQ_OK);
}

TEST_CASE("frequency sets and kernels") {
  auto fs = make_freqset(kLine);
  size_t d = 0;
  uint64_t half = 0;
  CHECK(rffdq_freqset_dim(fs.get(), &d) == RFFDQ_OK);
  CHECK(rffdq_freqset_half_size(fs.get(), &half) == RFFDQ_OK);
  CHECK(d == 1);
  CHECK(half == 3);
  char* stats = nullptr;
  REQUIRE(rffdq_freqset_stats_json(fs.get(), &stats) == RFFDQ_OK);
  CHECK(take(stats).find("\"half_size\"") != std::string::npos);
  char* dump = nullptr;
  REQUIRE(rffdq_freqset_dump_csv(fs.get(), &dump) == RFFDQ_OK);
  CHECK(take(dump).rfind("index,omega_1,in_half\n", 0) == 0);

  const double w[3] = {1, 1, 1};
  const double x = 0.3, y = 0.3;
  double k = 0;
  CHECK(rffdq_kernel_eval(fs.get(), w, 3, &x, &y, 1, &k) == RFFDQ_OK);
  CHECK(k == doctest::Approx(1.0));
  CHECK(rffdq_kernel_eval(fs.get(), w, 2, &x, &y, 1, &k) == RFFDQ_ERR_CONFIG);

  char* norm = nullptr;
  const char* f = R"({"d": 1, "terms": [{"omega": [1], "re": 0.5, "im": 0}]})";
  REQUIRE(rffdq_rkhs_norm_json(fs.get(), f, nullptr, &norm) == RFFDQ_OK);
  CHECK(take(norm).find("1.7320508075688772") != std::string::npos);
}

TEST_CASE("fit, serialize and predict") {
  auto fs = make_freqset(kLine);
  rffdq_distribution* dist_raw = nullptr;
  REQUIRE(rffdq_distribution_create(fs.get(), R"({"kind": "uniform"})", &dist_raw) == RFFDQ_OK);
  std::unique_ptr<rffdq_distribution, DistDeleter> dist(dist_raw);
  double p = 0;
  const double omega = 2;
  CHECK(rffdq_distribution_pmf(dist.get(), &omega, 1, &p) == RFFDQ_OK);
  CHECK(p == doctest::Approx(1.0 / 3));
  char* draws = nullptr;
  REQUIRE(rffdq_distribution_sample_csv(dist.get(), 3, 4, &draws) == RFFDQ_OK);
  CHECK(take(draws).rfind("draw,omega_1\n", 0) == 0);

  char* csv = nullptr;
  char* target = nullptr;
  const char* problem = R"({"encoding": {"dimensions": [[[-0.5, 0.5], [-0.5, 0.5]]]},
    "target": {"kind": "explicit", "function": {"d": 1, "terms": [{"omega": [2], "re": 0.5, "im": 0}]}},
    "n": 50, "seed": 2})";
  REQUIRE(rffdq_generate_problem(problem, &csv, &target) == RFFDQ_OK);
  const auto data_csv = take(csv);
  take(target);
  rffdq_dataset* data_raw = nullptr;
  REQUIRE(rffdq_dataset_from_csv(data_csv.c_str(), &data_raw) == RFFDQ_OK);
  std::unique_ptr<rffdq_dataset, DataDeleter> data(data_raw);
  size_t n = 0, d = 0;
  CHECK(rffdq_dataset_size(data.get(), &n, &d) == RFFDQ_OK);
  CHECK(n == 50);

  rffdq_model* rff_raw = nullptr;
  REQUIRE(rffdq_fit_rff(data.get(), dist.get(), 30, 1e-6, 9, &rff_raw) == RFFDQ_OK);
  std::unique_ptr<rffdq_model, ModelDeleter> rff(rff_raw);
  char* js = nullptr;
  REQUIRE(rffdq_model_to_json(rff.get(), &js) == RFFDQ_OK);
  const auto text = take(js);
  rffdq_model* back_raw = nullptr;
  REQUIRE(rffdq_model_from_json(text.c_str(), &back_raw) == RFFDQ_OK);
  std::unique_ptr<rffdq_model, ModelDeleter> back(back_raw);
  const double x = 1.1;
  double a = 0, b = 0;
  CHECK(rffdq_model_predict(rff.get(), &x, 1, &a) == RFFDQ_OK);
  CHECK(rffdq_model_predict(back.get(), &x, 1, &b) == RFFDQ_OK);
  CHECK(a == b);

  rffdq_model* krr_raw = nullptr;
  REQUIRE(rffdq_fit_krr(data.get(), kLine, nullptr, 1e-6, &krr_raw) == RFFDQ_OK);
  std::unique_ptr<rffdq_model, ModelDeleter> krr(krr_raw);
  double risk = 1;
  CHECK(rffdq_empirical_risk(krr.get(), data.get(), &risk) == RFFDQ_OK);
  CHECK(risk < 1e-8);
  char* report = nullptr;
  REQUIRE(rffdq_risk_json(krr.get(), problem, nullptr, &report) == RFFDQ_OK);
  CHECK(take(report).find("true_risk") != std::string::npos);
  rffdq_model* lin_raw = nullptr;
  REQUIRE(rffdq_fit_explicit(data.get(), kLine, nullptr, 1e-6, &lin_raw) == RFFDQ_OK);
  std::unique_ptr<rffdq_model, ModelDeleter> lin(lin_raw);
  double pk = 0, pl = 0;
  rffdq_model_predict(krr.get(), &x, 1, &pk);
  rffdq_model_predict(lin.get(), &x, 1, &pl);
  CHECK(std::abs(pk - pl) <= 1e-8);
}

TEST_CASE("circuits and bounds") {
  const char* circuit = R"({"qubits": 1, "gates": [{"kind": "encode", "pauli": "X", "scale": 0.5, "dim": 1}],
    "observable": {"terms": [{"coef": 1.0, "pauli": "Z"}]}})";
  const double x = 0.8;
  double v = 0;
  CHECK(rffdq_pqc_evaluate(circuit, nullptr, &x, 1, &v) == RFFDQ_OK);
  CHECK(v == doctest::Approx(std::cos(0.8)));
  char* spec = nullptr;
  REQUIRE(rffdq_pqc_spectrum(circuit, nullptr, 0, &spec) == RFFDQ_OK);
  CHECK(take(spec).find("diagnostics") != std::string::npos);

  char* suff = nullptr;
  REQUIRE(rffdq_bounds_sufficient(0.5, 1, 1, 0.1, 0.1, &suff) == RFFDQ_OK);
  CHECK(take(suff).find("\"c0\": 252") != std::string::npos);
  char* feas = nullptr;
  REQUIRE(rffdq_feasibility(kLine, R"({"kind": "uniform"})", nullptr, -1, 1, 0.1, 0.1, -1, -1, &feas) == RFFDQ_OK);
  CHECK(take(feas).find("INCONCLUSIVE") != std::string::npos);
}
