// Command-line front end; talks to the library exclusively through rffdq.h.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "rffdq/rffdq.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Failure {
  rffdq_status status;
  std::string message;
};

void check(rffdq_status s) {
  if (s != RFFDQ_OK) throw Failure{s, rffdq_last_error()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{RFFDQ_ERR_IO, "cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw Failure{RFFDQ_ERR_IO, "cannot write '" + path + "'"};
}

// Owns a string returned by the library.
struct LibString {
  char* p = nullptr;
  ~LibString() { rffdq_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};

using FreqSet = Handle<rffdq_freqset, rffdq_freqset_free>;
using Dist = Handle<rffdq_distribution, rffdq_distribution_free>;
using Data = Handle<rffdq_dataset, rffdq_dataset_free>;
using Model = Handle<rffdq_model, rffdq_model_free>;

double parse_lambda(const std::string& s) {
  if (s == "auto") return -1.0;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && v >= 0.0) return v;
  } catch (const std::exception&) {
  }
  throw Failure{RFFDQ_ERR_CONFIG, "--lambda must be 'auto' or a nonnegative number"};
}

const char* opt_cstr(const std::optional<std::string>& s) { return s ? s->c_str() : nullptr; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random Fourier feature regression with re-weighted trigonometric kernels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rffdq_version()));

  // freqset
  auto* freqset = app.add_subcommand("freqset", "Build the frequency lattice of an encoding strategy");
  std::string fs_encoding, fs_dump;
  bool fs_stats = false;
  freqset->add_option("--encoding", fs_encoding, "Encoding JSON")->required();
  freqset->add_flag("--stats", fs_stats, "Print lattice statistics as JSON");
  freqset->add_option("--dump", fs_dump, "Write the lattice as CSV");

  // kernel
  auto* kernel = app.add_subcommand("kernel", "Evaluate the re-weighted kernel between two point sets");
  std::string k_encoding, k_x, k_xp, k_out;
  std::optional<std::string> k_weights;
  kernel->add_option("--encoding", k_encoding)->required();
  kernel->add_option("--weights", k_weights);
  kernel->add_option("--x", k_x)->required();
  kernel->add_option("--xprime", k_xp)->required();
  kernel->add_option("--out", k_out);

  // rkhs-norm
  auto* rkhs = app.add_subcommand("rkhs-norm", "RKHS norm of a trigonometric polynomial");
  std::string r_function, r_out;
  std::optional<std::string> r_weights, r_encoding;
  rkhs->add_option("--function", r_function)->required();
  rkhs->add_option("--weights", r_weights);
  rkhs->add_option("--encoding", r_encoding, "Needed unless the function embeds its encoding");
  rkhs->add_option("--out", r_out);

  // sample
  auto* sample = app.add_subcommand("sample", "Draw frequencies from a distribution");
  std::string s_encoding, s_dist, s_out;
  std::size_t s_count = 1;
  std::uint64_t s_seed = 0;
  sample->add_option("--encoding", s_encoding)->required();
  sample->add_option("--dist", s_dist)->required();
  sample->add_option("--M", s_count)->required();
  sample->add_option("--seed", s_seed);
  sample->add_option("--out", s_out);

  // generate
  auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset from a problem description");
  std::string g_problem, g_out, g_target;
  generate->add_option("--problem", g_problem)->required();
  generate->add_option("--out", g_out);
  generate->add_option("--target-out", g_target);

  // fit
  auto* fit = app.add_subcommand("fit", "RFF ridge regression");
  std::string f_data, f_encoding, f_dist, f_lambda = "auto", f_out;
  std::size_t f_M = 0;
  std::uint64_t f_seed = 0;
  fit->add_option("--data", f_data)->required();
  fit->add_option("--encoding", f_encoding)->required();
  fit->add_option("--dist", f_dist)->required();
  fit->add_option("--M", f_M)->required();
  fit->add_option("--lambda", f_lambda);
  fit->add_option("--seed", f_seed);
  fit->add_option("--out", f_out);

  // oracle-krr
  auto* krr = app.add_subcommand("oracle-krr", "Exact kernel ridge regression (or explicit-feature ridge)");
  std::string o_data, o_encoding, o_lambda = "auto", o_out;
  std::optional<std::string> o_weights, o_dist;
  bool o_explicit = false;
  krr->add_option("--data", o_data)->required();
  krr->add_option("--encoding", o_encoding)->required();
  auto* o_w = krr->add_option("--weights", o_weights);
  krr->add_option("--dist", o_dist, "Derive weights from a distribution")->excludes(o_w);
  krr->add_option("--lambda", o_lambda);
  krr->add_flag("--explicit", o_explicit, "Fit the explicit-feature hyperplane instead of dual coefficients");
  krr->add_option("--out", o_out);

  // risk
  auto* risk = app.add_subcommand("risk", "True risk of a fitted model on a synthetic problem");
  std::string rk_model, rk_problem, rk_out;
  std::optional<std::string> rk_data;
  risk->add_option("--model", rk_model)->required();
  risk->add_option("--problem", rk_problem)->required();
  risk->add_option("--data", rk_data, "Also report the empirical risk on this dataset");
  risk->add_option("--out", rk_out);

  // pqc-spectrum
  auto* pqc = app.add_subcommand("pqc-spectrum", "Simulate a circuit and extract its Fourier spectrum");
  std::string p_circuit, p_out;
  std::optional<std::string> p_theta;
  std::size_t p_grid = 0;
  pqc->add_option("--circuit", p_circuit)->required();
  pqc->add_option("--theta", p_theta);
  pqc->add_option("--grid", p_grid, "Grid points per dimension (0 = automatic)");
  pqc->add_option("--out", p_out);

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Sample-complexity calculators");
  bounds->require_subcommand(1);
  auto* suff = bounds->add_subcommand("sufficient", "Sufficient n and M");
  double b_opnorm = 0.5, b_C = 1.0, b_b = 1.0, b_eps = 0.1, b_delta = 0.05;
  std::string b_out;
  suff->add_option("--opnorm", b_opnorm)->required();
  suff->add_option("--C", b_C)->required();
  suff->add_option("--b", b_b)->required();
  suff->add_option("--eps", b_eps)->required();
  suff->add_option("--delta", b_delta)->required();
  suff->add_option("--out", b_out);
  auto* lower = bounds->add_subcommand("lower", "Necessary M for a target expected error");
  std::string l_function, l_dist, l_out;
  std::optional<std::string> l_encoding;
  double l_epshat = 0.0;
  lower->add_option("--function", l_function)->required();
  lower->add_option("--dist", l_dist)->required();
  lower->add_option("--epshat", l_epshat)->required();
  lower->add_option("--encoding", l_encoding);
  lower->add_option("--out", l_out);
  auto* feas = bounds->add_subcommand("feasibility", "Combined verdict from both bounds");
  std::string fe_encoding, fe_dist, fe_out;
  std::optional<std::string> fe_function;
  double fe_C = -1.0, fe_b = 1.0, fe_eps = 0.1, fe_delta = 0.05, fe_epshat = -1.0, fe_budget = -1.0;
  feas->add_option("--encoding", fe_encoding)->required();
  feas->add_option("--dist", fe_dist)->required();
  feas->add_option("--function", fe_function);
  feas->add_option("--C", fe_C);
  feas->add_option("--b", fe_b);
  feas->add_option("--eps", fe_eps);
  feas->add_option("--delta", fe_delta);
  feas->add_option("--epshat", fe_epshat);
  feas->add_option("--budget", fe_budget);
  feas->add_option("--out", fe_out);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Parameter sweeps and plots");
  experiment->require_subcommand(1);
  auto* run = experiment->add_subcommand("run", "Run a sweep");
  std::string e_config, e_out;
  std::size_t e_threads = 0, e_stop = 0;
  bool e_resume = false, e_timing = false;
  run->add_option("--config", e_config)->required();
  run->add_option("--out", e_out)->required();
  run->add_option("--threads", e_threads, "Worker threads (default: RFFDQ_THREADS or all cores)");
  run->add_flag("--resume", e_resume, "Skip experiments already present in --out");
  run->add_flag("--timing", e_timing, "Record wall-clock runtimes (outputs are no longer byte-stable)");
  run->add_option("--stop-after", e_stop, "Stop after writing this many rows")->group("");
  auto* plot = experiment->add_subcommand("plot", "Render a results table as SVG");
  std::string pl_in, pl_kind, pl_out;
  plot->add_option("--in", pl_in)->required();
  plot->add_option("--kind", pl_kind)->required();
  plot->add_option("--out", pl_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (freqset->parsed()) {
      FreqSet fs;
      check(rffdq_freqset_create(read_file(fs_encoding).c_str(), fs_dump.empty() ? 0 : 1, &fs.p));
      if (fs_stats || fs_dump.empty()) {
        LibString s;
        check(rffdq_freqset_stats_json(fs.p, &s.p));
        std::cout << s.str();
      }
      if (!fs_dump.empty()) {
        LibString s;
        check(rffdq_freqset_dump_csv(fs.p, &s.p));
        write_output(fs_dump, s.str());
      }
    } else if (kernel->parsed()) {
      FreqSet fs;
      check(rffdq_freqset_create(read_file(k_encoding).c_str(), 1, &fs.p));
      const std::optional<std::string> w = k_weights ? std::optional(read_file(*k_weights)) : std::nullopt;
      LibString s;
      check(rffdq_kernel_matrix_csv(fs.p, opt_cstr(w), read_file(k_x).c_str(), read_file(k_xp).c_str(), &s.p));
      write_output(k_out, s.str());
    } else if (rkhs->parsed()) {
      FreqSet fs;
      if (r_encoding) check(rffdq_freqset_create(read_file(*r_encoding).c_str(), 1, &fs.p));
      const std::optional<std::string> w = r_weights ? std::optional(read_file(*r_weights)) : std::nullopt;
      LibString s;
      check(rffdq_rkhs_norm_json(fs.p, read_file(r_function).c_str(), opt_cstr(w), &s.p));
      write_output(r_out, s.str());
    } else if (sample->parsed()) {
      FreqSet fs;
      check(rffdq_freqset_create(read_file(s_encoding).c_str(), 1, &fs.p));
      Dist dist;
      check(rffdq_distribution_create(fs.p, read_file(s_dist).c_str(), &dist.p));
      LibString s;
      check(rffdq_distribution_sample_csv(dist.p, s_seed, s_count, &s.p));
      write_output(s_out, s.str());
    } else if (generate->parsed()) {
      LibString csv, target;
      check(rffdq_generate_problem(read_file(g_problem).c_str(), &csv.p, &target.p));
      write_output(g_out, csv.str());
      if (!g_target.empty()) write_output(g_target, target.str());
    } else if (fit->parsed()) {
      const double lambda = parse_lambda(f_lambda);
      FreqSet fs;
      check(rffdq_freqset_create(read_file(f_encoding).c_str(), 1, &fs.p));
      Dist dist;
      check(rffdq_distribution_create(fs.p, read_file(f_dist).c_str(), &dist.p));
      Data data;
      check(rffdq_dataset_from_csv(read_file(f_data).c_str(), &data.p));
      Model model;
      check(rffdq_fit_rff(data.p, dist.p, f_M, lambda, f_seed, &model.p));
      LibString s;
      check(rffdq_model_to_json(model.p, &s.p));
      write_output(f_out, s.str());
    } else if (krr->parsed()) {
      const double lambda = parse_lambda(o_lambda);
      const std::string enc = read_file(o_encoding);
      std::optional<std::string> weights = o_weights ? std::optional(read_file(*o_weights)) : std::nullopt;
      if (o_dist) {
        FreqSet fs;
        check(rffdq_freqset_create(enc.c_str(), 1, &fs.p));
        Dist dist;
        check(rffdq_distribution_create(fs.p, read_file(*o_dist).c_str(), &dist.p));
        LibString w;
        check(rffdq_distribution_weights_json(dist.p, &w.p));
        weights = w.str();
      }
      Data data;
      check(rffdq_dataset_from_csv(read_file(o_data).c_str(), &data.p));
      Model model;
      if (o_explicit)
        check(rffdq_fit_explicit(data.p, enc.c_str(), opt_cstr(weights), lambda, &model.p));
      else
        check(rffdq_fit_krr(data.p, enc.c_str(), opt_cstr(weights), lambda, &model.p));
      LibString s;
      check(rffdq_model_to_json(model.p, &s.p));
      write_output(o_out, s.str());
    } else if (risk->parsed()) {
      Model model;
      check(rffdq_model_from_json(read_file(rk_model).c_str(), &model.p));
      Data data;
      if (rk_data) check(rffdq_dataset_from_csv(read_file(*rk_data).c_str(), &data.p));
      LibString s;
      check(rffdq_risk_json(model.p, read_file(rk_problem).c_str(), data.p, &s.p));
      write_output(rk_out, s.str());
    } else if (pqc->parsed()) {
      const std::optional<std::string> theta = p_theta ? std::optional(read_file(*p_theta)) : std::nullopt;
      LibString s;
      check(rffdq_pqc_spectrum(read_file(p_circuit).c_str(), opt_cstr(theta), p_grid, &s.p));
      write_output(p_out, s.str());
    } else if (suff->parsed()) {
      LibString s;
      check(rffdq_bounds_sufficient(b_opnorm, b_C, b_b, b_eps, b_delta, &s.p));
      write_output(b_out, s.str());
    } else if (lower->parsed()) {
      FreqSet fs;
      if (l_encoding) check(rffdq_freqset_create(read_file(*l_encoding).c_str(), 1, &fs.p));
      LibString s;
      check(rffdq_bounds_lower(fs.p, read_file(l_function).c_str(), read_file(l_dist).c_str(), l_epshat, &s.p));
      write_output(l_out, s.str());
    } else if (feas->parsed()) {
      const std::optional<std::string> f = fe_function ? std::optional(read_file(*fe_function)) : std::nullopt;
      LibString s;
      check(rffdq_feasibility(read_file(fe_encoding).c_str(), read_file(fe_dist).c_str(), opt_cstr(f), fe_C, fe_b,
                              fe_eps, fe_delta, fe_epshat, fe_budget, &s.p));
      write_output(fe_out, s.str());
    } else if (run->parsed()) {
      check(rffdq_experiment_run(read_file(e_config).c_str(), e_out.c_str(), e_threads, e_resume, e_timing, e_stop));
    } else if (plot->parsed()) {
      LibString s;
      check(rffdq_experiment_plot(read_file(pl_in).c_str(), pl_kind.c_str(), &s.p));
      write_output(pl_out, s.str());
    }
  } catch (const Failure& f) {
    std::cerr << "rffdq: " << f.message << "\n";
    return f.status == RFFDQ_ERR_NUMERIC || f.status == RFFDQ_ERR_INTERNAL ? kExitNumeric : kExitConfig;
  }
  return 0;
}
