#include "rffdq/rffdq.h"

#include <cmath>
#include <cstring>
#include <new>
#include <string>

#include "rffdq/bounds.hpp"
#include "rffdq/error.hpp"
#include "rffdq/harness.hpp"
#include "rffdq/io.hpp"

struct rffdq_freqset {
  rffdq::EncodingStrategy enc;
  std::shared_ptr<const rffdq::FrequencySet> fs;
};

struct rffdq_distribution {
  std::shared_ptr<const rffdq::FrequencyDistribution> dist;
};

struct rffdq_dataset {
  rffdq::Dataset data;
};

struct rffdq_model {
  rffdq::FittedModel model;
};

namespace {

using rffdq::ErrorKind;
using rffdq::require;
namespace io = rffdq::io;

thread_local std::string g_last_error;

rffdq_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return RFFDQ_ERR_CONFIG;
    case ErrorKind::Capacity: return RFFDQ_ERR_CAPACITY;
    case ErrorKind::Domain: return RFFDQ_ERR_DOMAIN;
    case ErrorKind::Numeric: return RFFDQ_ERR_NUMERIC;
    default: return RFFDQ_ERR_IO;
  }
}

template <typename F>
rffdq_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return RFFDQ_OK;
  } catch (const rffdq::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RFFDQ_ERR_CAPACITY;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RFFDQ_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorKind::Config, std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

std::string dump(const io::json& j) { return j.dump(2) + "\n"; }

std::shared_ptr<const rffdq::FrequencySet> build_lattice(const rffdq::EncodingStrategy& enc) {
  try {
    return std::make_shared<const rffdq::FrequencySet>(rffdq::FrequencySet::build(enc, true));
  } catch (const rffdq::Error& e) {
    if (e.kind() != ErrorKind::Capacity) throw;
    return std::make_shared<const rffdq::FrequencySet>(rffdq::FrequencySet::build(enc, false));
  }
}

rffdq::WeightVector weights_or_uniform(const char* weights_json, const rffdq::FrequencySet& fs) {
  if (!weights_json) return rffdq::WeightVector::uniform(fs.half_size());
  auto w = rffdq::WeightVector(io::weights_from_json(io::parse_json(weights_json)));
  require(w.size() == fs.half_size(), ErrorKind::Config,
          "weight vector has " + std::to_string(w.size()) + " entries, lattice half has " +
              std::to_string(fs.half_size()));
  return w;
}

std::optional<double> lambda_arg(double lambda) {
  if (lambda < 0.0) return std::nullopt;
  return lambda;
}

}  // namespace

extern "C" {

const char* rffdq_version(void) { return "0.1.0"; }

const char* rffdq_last_error(void) { return g_last_error.c_str(); }

void rffdq_string_free(char* s) { std::free(s); }

rffdq_status rffdq_freqset_create(const char* encoding_json, int materialize, rffdq_freqset** out) {
  return guarded([&] {
    need(encoding_json, "encoding_json");
    need(out, "out");
    auto enc = io::encoding_from_json(io::parse_json(encoding_json));
    auto fs = std::make_shared<const rffdq::FrequencySet>(rffdq::FrequencySet::build(enc, materialize != 0));
    *out = new rffdq_freqset{std::move(enc), std::move(fs)};
  });
}

void rffdq_freqset_free(rffdq_freqset* fs) { delete fs; }

rffdq_status rffdq_freqset_dim(const rffdq_freqset* fs, size_t* out) {
  return guarded([&] {
    need(fs, "fs");
    need(out, "out");
    *out = fs->fs->dim();
  });
}

rffdq_status rffdq_freqset_half_size(const rffdq_freqset* fs, uint64_t* out) {
  return guarded([&] {
    need(fs, "fs");
    need(out, "out");
    *out = fs->fs->half_size();
  });
}

rffdq_status rffdq_freqset_stats_json(const rffdq_freqset* fs, char** out) {
  return guarded([&] {
    need(fs, "fs");
    need(out, "out");
    const auto& f = *fs->fs;
    io::json sizes = io::json::array();
    for (std::size_t j = 0; j < f.dim(); ++j) sizes.push_back(f.component_size(j));
    io::json j = {{"d", f.dim()},
                  {"per_dimension_sizes", sizes},
                  {"per_dimension", f.per_dimension()},
                  {"full_size", f.full_size()},
                  {"half_size", f.half_size()},
                  {"positive_size", f.positive_size()},
                  {"is_integer", f.is_integer()},
                  {"materialized", f.materialized()},
                  {"n_min", f.min_component_size()},
                  {"n_max", f.max_component_size()}};
    *out = dup_string(dump(j));
  });
}

rffdq_status rffdq_freqset_dump_csv(const rffdq_freqset* fs, char** out) {
  return guarded([&] {
    need(fs, "fs");
    need(out, "out");
    const auto& f = *fs->fs;
    require(f.full_size() <= rffdq::FrequencySetLimits{}.materialize_cap, ErrorKind::Capacity,
            "lattice too large to dump");
    std::string csv = "index";
    for (std::size_t j = 0; j < f.dim(); ++j) csv += ",omega_" + std::to_string(j + 1);
    csv += ",in_half\n";
    for (std::uint64_t flat = 0; flat < f.full_size(); ++flat) {
      const auto coords = f.coords_of(flat);
      const auto omega = f.frequency_of_coords(coords);
      csv += std::to_string(flat);
      for (double v : omega) csv += "," + io::format_number(v == 0.0 ? 0.0 : v);
      csv += flat >= f.centre_flat() ? ",1\n" : ",0\n";
    }
    *out = dup_string(csv);
  });
}

rffdq_status rffdq_kernel_matrix_csv(const rffdq_freqset* fs, const char* weights_json, const char* x_csv,
                                     const char* xprime_csv, char** out) {
  return guarded([&] {
    need(fs, "fs");
    need(x_csv, "x_csv");
    need(xprime_csv, "xprime_csv");
    need(out, "out");
    const auto w = weights_or_uniform(weights_json, *fs->fs);
    const auto X = io::points_from_csv(x_csv);
    const auto Xp = io::points_from_csv(xprime_csv);
    require(static_cast<std::size_t>(X.cols()) == fs->fs->dim() && X.cols() == Xp.cols(), ErrorKind::Config,
            "point dimension does not match the encoding");
    std::string csv;
    std::vector<double> a(X.cols()), b(X.cols());
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      for (Eigen::Index c = 0; c < X.cols(); ++c) a[c] = X(r, c);
      for (Eigen::Index s = 0; s < Xp.rows(); ++s) {
        for (Eigen::Index c = 0; c < Xp.cols(); ++c) b[c] = Xp(s, c);
        if (s) csv += ",";
        csv += io::format_number(rffdq::kernel_eval(a, b, *fs->fs, w));
      }
      csv += "\n";
    }
    *out = dup_string(csv);
  });
}

rffdq_status rffdq_kernel_eval(const rffdq_freqset* fs, const double* weights, size_t n_weights, const double* x,
                               const double* xprime, size_t d, double* out) {
  return guarded([&] {
    need(fs, "fs");
    need(x, "x");
    need(xprime, "xprime");
    need(out, "out");
    const auto w = weights ? rffdq::WeightVector(std::vector<double>(weights, weights + n_weights))
                           : rffdq::WeightVector::uniform(fs->fs->half_size());
    *out = rffdq::kernel_eval({x, d}, {xprime, d}, *fs->fs, w);
  });
}

rffdq_status rffdq_rkhs_norm_json(const rffdq_freqset* fs, const char* function_json, const char* weights_json,
                                  char** out) {
  return guarded([&] {
    need(function_json, "function_json");
    need(out, "out");
    const auto f = io::trig_from_json(io::parse_json(function_json), fs ? fs->fs : nullptr);
    const auto w = weights_or_uniform(weights_json, f.freq_set());
    io::json j = {{"rkhs_norm", rffdq::rkhs_norm(f, w)},
                  {"l2_norm_sq", rffdq::l2_norm_sq(f)},
                  {"coeff_norm_sq", rffdq::coefficient_norm_sq(f)}};
    *out = dup_string(dump(j));
  });
}

rffdq_status rffdq_distribution_create(const rffdq_freqset* fs, const char* dist_json, rffdq_distribution** out) {
  return guarded([&] {
    need(dist_json, "dist_json");
    need(out, "out");
    auto dist = io::distribution_from_json(io::parse_json(dist_json), fs ? fs->fs : nullptr);
    *out = new rffdq_distribution{std::make_shared<const rffdq::FrequencyDistribution>(std::move(dist))};
  });
}

void rffdq_distribution_free(rffdq_distribution* dist) { delete dist; }

rffdq_status rffdq_distribution_pmf(const rffdq_distribution* dist, const double* omega, size_t d, double* out) {
  return guarded([&] {
    need(dist, "dist");
    need(omega, "omega");
    need(out, "out");
    *out = dist->dist->pmf({omega, d});
  });
}

rffdq_status rffdq_distribution_weights_json(const rffdq_distribution* dist, char** out) {
  return guarded([&] {
    need(dist, "dist");
    need(out, "out");
    const auto w = rffdq::weights_of(dist->dist->dense_pmf());
    *out = dup_string(dump(io::json{{"weights", w.values()}}));
  });
}

rffdq_status rffdq_distribution_sample_csv(const rffdq_distribution* dist, uint64_t seed, size_t count, char** out) {
  return guarded([&] {
    need(dist, "dist");
    need(out, "out");
    require(count >= 1, ErrorKind::Config, "sample count must be at least 1");
    rffdq::SeededRng rng(seed);
    const auto draws = dist->dist->sample(rng, count);
    std::string csv = "draw";
    for (std::size_t j = 0; j < dist->dist->freq_set().dim(); ++j) csv += ",omega_" + std::to_string(j + 1);
    csv += "\n";
    for (std::size_t i = 0; i < draws.size(); ++i) {
      csv += std::to_string(i);
      for (double v : draws[i]) csv += "," + io::format_number(v);
      csv += "\n";
    }
    *out = dup_string(csv);
  });
}

rffdq_status rffdq_dataset_from_csv(const char* csv, rffdq_dataset** out) {
  return guarded([&] {
    need(csv, "csv");
    need(out, "out");
    *out = new rffdq_dataset{io::dataset_from_csv(csv, "csv")};
  });
}

void rffdq_dataset_free(rffdq_dataset* data) { delete data; }

rffdq_status rffdq_dataset_size(const rffdq_dataset* data, size_t* n, size_t* d) {
  return guarded([&] {
    need(data, "data");
    if (n) *n = data->data.size();
    if (d) *d = data->data.dim();
  });
}

rffdq_status rffdq_fit_rff(const rffdq_dataset* data, const rffdq_distribution* dist, size_t M, double lambda,
                           uint64_t seed, rffdq_model** out) {
  return guarded([&] {
    need(data, "data");
    need(dist, "dist");
    need(out, "out");
    rffdq::SeededRng rng(seed);
    *out = new rffdq_model{rffdq::rff_fit(data->data, *dist->dist, M, lambda_arg(lambda), rng)};
  });
}

rffdq_status rffdq_fit_krr(const rffdq_dataset* data, const char* encoding_json, const char* weights_json,
                           double lambda, rffdq_model** out) {
  return guarded([&] {
    need(data, "data");
    need(encoding_json, "encoding_json");
    need(out, "out");
    auto enc = io::encoding_from_json(io::parse_json(encoding_json));
    std::optional<std::vector<double>> w;
    if (weights_json) w = io::weights_from_json(io::parse_json(weights_json));
    const auto kernel = rffdq::KernelSpec::make(std::move(enc), std::move(w));
    const double lam = lambda_arg(lambda).value_or(1.0 / std::sqrt(static_cast<double>(data->data.size())));
    *out = new rffdq_model{rffdq::kernel_ridge_fit(data->data, kernel, lam)};
  });
}

rffdq_status rffdq_fit_explicit(const rffdq_dataset* data, const char* encoding_json, const char* weights_json,
                                double lambda, rffdq_model** out) {
  return guarded([&] {
    need(data, "data");
    need(encoding_json, "encoding_json");
    need(out, "out");
    auto enc = io::encoding_from_json(io::parse_json(encoding_json));
    std::optional<std::vector<double>> w;
    if (weights_json) w = io::weights_from_json(io::parse_json(weights_json));
    const auto kernel = rffdq::KernelSpec::make(std::move(enc), std::move(w));
    const double lam = lambda_arg(lambda).value_or(1.0 / std::sqrt(static_cast<double>(data->data.size())));
    *out = new rffdq_model{rffdq::explicit_linear_fit(data->data, kernel, lam)};
  });
}

void rffdq_model_free(rffdq_model* model) { delete model; }

rffdq_status rffdq_model_to_json(const rffdq_model* model, char** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = dup_string(dump(io::model_to_json(model->model)));
  });
}

rffdq_status rffdq_model_from_json(const char* json, rffdq_model** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new rffdq_model{io::model_from_json(io::parse_json(json))};
  });
}

rffdq_status rffdq_model_predict(const rffdq_model* model, const double* x, size_t d, double* out) {
  return guarded([&] {
    need(model, "model");
    need(x, "x");
    need(out, "out");
    *out = model->model.predict(std::span<const double>(x, d));
  });
}

rffdq_status rffdq_empirical_risk(const rffdq_model* model, const rffdq_dataset* data, double* out) {
  return guarded([&] {
    need(model, "model");
    need(data, "data");
    need(out, "out");
    *out = rffdq::empirical_risk(model->model, data->data);
  });
}

rffdq_status rffdq_risk_json(const rffdq_model* model, const char* problem_json, const rffdq_dataset* data,
                             char** out) {
  return guarded([&] {
    need(model, "model");
    need(problem_json, "problem_json");
    need(out, "out");
    const auto spec = rffdq::problem_from_json(io::parse_json(problem_json));
    const auto target = rffdq::materialize_target(spec);
    const double var = spec.sigma * spec.sigma;
    const auto est = rffdq::true_risk_estimate(model->model, target, var);
    io::json j = {{"true_risk", est.risk},
                  {"l2_err_sq", est.l2_sq},
                  {"noise_variance", var},
                  {"method", est.quadrature ? "quadrature" : "monte_carlo"},
                  {"std_error", est.std_error}};
    const double norm = rffdq::coefficient_norm_sq(target);
    j["rel_l2_err"] = norm > 0.0 ? io::json(est.l2_sq / norm) : io::json(nullptr);
    if (data) j["emp_risk"] = rffdq::empirical_risk(model->model, data->data);
    *out = dup_string(dump(j));
  });
}

rffdq_status rffdq_generate_problem(const char* problem_json, char** data_csv, char** target_json) {
  return guarded([&] {
    need(problem_json, "problem_json");
    const auto spec = rffdq::problem_from_json(io::parse_json(problem_json));
    const auto gp = rffdq::generate_problem(spec);
    std::string csv = "# " + gp.data.meta + " b=" + io::format_number(gp.data.b_bound) + "\n" +
                      io::dataset_to_csv(gp.data);
    if (data_csv) *data_csv = dup_string(csv);
    if (target_json) *target_json = dup_string(dump(io::trig_to_json(gp.target, &spec.encoding)));
  });
}

rffdq_status rffdq_pqc_spectrum(const char* circuit_json, const char* theta_json, size_t grid, char** out) {
  return guarded([&] {
    need(circuit_json, "circuit_json");
    need(out, "out");
    const auto [circuit, obs] = io::circuit_from_json(io::parse_json(circuit_json));
    const auto theta = theta_json ? io::theta_from_json(io::parse_json(theta_json)) : std::vector<double>{};
    const auto ex = rffdq::extract_spectrum(circuit, obs, theta, grid);
    rffdq::check_extraction(ex);
    const auto enc = rffdq::encoding_of(circuit);
    auto j = io::trig_to_json(ex.poly, &enc);
    j["diagnostics"] = {{"off_lattice_max", ex.off_lattice_max},
                        {"conjugate_asymmetry", ex.conjugate_asymmetry},
                        {"grid_max_abs", ex.grid_max_abs},
                        {"grid_per_dim", ex.grid_per_dim},
                        {"observable_bound", obs.inf_norm_bound()}};
    *out = dup_string(dump(j));
  });
}

rffdq_status rffdq_pqc_evaluate(const char* circuit_json, const char* theta_json, const double* x, size_t d,
                                double* out) {
  return guarded([&] {
    need(circuit_json, "circuit_json");
    need(out, "out");
    const auto [circuit, obs] = io::circuit_from_json(io::parse_json(circuit_json));
    const auto theta = theta_json ? io::theta_from_json(io::parse_json(theta_json)) : std::vector<double>{};
    *out = rffdq::evaluate_model(circuit, obs, theta, {x, d});
  });
}

rffdq_status rffdq_bounds_sufficient(double op_norm, double C, double b, double eps, double delta, char** out) {
  return guarded([&] {
    need(out, "out");
    *out = dup_string(dump(io::bounds_to_json(rffdq::theorem1_sufficient({op_norm, C, b, eps, delta}))));
  });
}

rffdq_status rffdq_bounds_lower(const rffdq_freqset* fs, const char* function_json, const char* dist_json,
                                double eps_hat, char** out) {
  return guarded([&] {
    need(function_json, "function_json");
    need(dist_json, "dist_json");
    need(out, "out");
    const auto f = io::trig_from_json(io::parse_json(function_json), fs ? fs->fs : nullptr);
    const auto dist = io::distribution_from_json(io::parse_json(dist_json), f.freq_set_ptr());
    *out = dup_string(dump(io::lower_bound_to_json(rffdq::lemma3_required_samples(f, dist, eps_hat))));
  });
}

rffdq_status rffdq_feasibility(const char* encoding_json, const char* dist_json, const char* function_json, double C,
                               double b, double eps, double delta, double eps_hat, double budget, char** out) {
  return guarded([&] {
    need(encoding_json, "encoding_json");
    need(dist_json, "dist_json");
    need(out, "out");
    const auto enc = io::encoding_from_json(io::parse_json(encoding_json));
    const auto fs = build_lattice(enc);
    const auto dist = io::distribution_from_json(io::parse_json(dist_json), fs);
    rffdq::FeasibilityInputs in;
    if (function_json) {
      require(fs->materialized(), ErrorKind::Capacity, "lattice too large to hold an explicit function");
      in.f_hat = io::trig_from_json(io::parse_json(function_json), fs);
    }
    if (C >= 0.0) in.C = C;
    in.b = b;
    in.eps = eps;
    in.delta = delta;
    if (eps_hat >= 0.0) in.eps_hat = eps_hat;
    if (budget > 0.0) in.budget = budget;
    *out = dup_string(dump(io::feasibility_to_json(rffdq::feasibility_report(enc, dist, in))));
  });
}

rffdq_status rffdq_experiment_run(const char* config_json, const char* out_path, size_t threads, int resume,
                                  int timing, size_t stop_after) {
  return guarded([&] {
    need(config_json, "config_json");
    need(out_path, "out_path");
    const auto cfg = rffdq::sweep_from_json(io::parse_json(config_json));
    rffdq::RunOptions opt;
    opt.threads = threads;
    opt.resume = resume != 0;
    opt.timing = timing != 0;
    if (stop_after > 0) opt.stop_after = stop_after;
    rffdq::run_sweep(cfg, out_path, opt);
  });
}

rffdq_status rffdq_experiment_plot(const char* results_csv, const char* kind, char** svg) {
  return guarded([&] {
    need(results_csv, "results_csv");
    need(kind, "kind");
    need(svg, "svg");
    const auto k = rffdq::plot_kind_from_name(kind);
    *svg = dup_string(rffdq::emit_plot(rffdq::results_from_csv(results_csv), k));
  });
}

}  // extern "C"
