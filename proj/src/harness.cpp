#include "rffdq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "rffdq/bounds.hpp"
#include "rffdq/error.hpp"

namespace rffdq {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kTargetStream = 2;
constexpr std::uint64_t kProbeStream = 3;
constexpr std::size_t kProbePoints = 4096;
constexpr std::uint64_t kKrrHalfCap = 4096;
constexpr std::size_t kKrrSampleCap = 4000;

std::size_t as_count(const io::json& j, const char* what) {
  require(j.is_number() && j.get<double>() >= 0.0 && j.get<double>() == std::floor(j.get<double>()),
          ErrorKind::Config, std::string(what) + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

std::uint64_t as_seed(const io::json& j, const char* what) {
  require(j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0), ErrorKind::Config,
          std::string(what) + " must be a nonnegative integer");
  return j.get<std::uint64_t>();
}

TrigPolynomial random_target(const ProblemSpec& spec) {
  const auto& fs = spec.fs;
  const auto& t = spec.target;
  require(t.support_size >= 1 && t.support_size <= fs->half_size(), ErrorKind::Config,
          "random target support size must lie in [1, |Omega_D|]");
  SeededRng rng(t.seed, kTargetStream);
  std::vector<std::uint64_t> support;
  std::set<std::uint64_t> seen;
  if (t.support_from) {
    require(t.support_from->freq_set().same_lattice(*fs), ErrorKind::Config,
            "target support distribution lives on a different lattice");
    std::size_t attempts = 0;
    while (support.size() < t.support_size) {
      require(++attempts <= 1000 * t.support_size, ErrorKind::Config,
              "could not draw enough distinct support frequencies from the given distribution");
      const auto idx = t.support_from->sample_indices(rng, 1).front();
      if (seen.insert(idx).second) support.push_back(idx);
    }
  } else {
    // partial Fisher-Yates over the canonical half
    std::vector<std::uint64_t> pool(fs->half_size());
    for (std::uint64_t i = 0; i < pool.size(); ++i) pool[i] = i;
    for (std::size_t i = 0; i < t.support_size; ++i) {
      const auto k = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[k]);
      support.push_back(pool[i]);
    }
  }
  std::vector<Complex> c(fs->half_size());
  for (auto idx : support) {
    const double re = rng.uniform(-1.0, 1.0);
    const double im = rng.uniform(-1.0, 1.0);
    c[idx] = idx == 0 ? Complex(re, 0.0) : Complex(re, im);
  }
  return TrigPolynomial(fs, std::move(c));
}

GeneratedProblem generate_with_target(const ProblemSpec& spec, TrigPolynomial target) {
  require(spec.n >= 1, ErrorKind::Config, "n must be at least 1");
  require(std::isfinite(spec.sigma) && spec.sigma >= 0.0, ErrorKind::Config, "sigma must be nonnegative");
  const std::size_t d = spec.fs->dim();
  const double half_width = spec.sigma * std::sqrt(3.0);
  SeededRng rng = SeededRng(spec.seed, spec.data_stream).derive(kDataStream);
  GeneratedProblem out{Dataset{}, std::move(target), spec.sigma * spec.sigma};
  auto& data = out.data;
  data.X.resize(static_cast<Eigen::Index>(spec.n), static_cast<Eigen::Index>(d));
  data.Y.resize(static_cast<Eigen::Index>(spec.n));
  std::vector<double> x(d);
  double sup = 0.0;
  for (std::size_t k = 0; k < spec.n; ++k) {
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = rng.uniform(0.0, kTwoPi);
      data.X(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = x[j];
    }
    const double f = out.target(x);
    sup = std::max(sup, std::abs(f));
    const double noise = half_width > 0.0 ? rng.uniform(-half_width, half_width) : 0.0;
    data.Y(static_cast<Eigen::Index>(k)) = f + noise;
  }
  SeededRng probe(spec.target.seed, kProbeStream);
  for (std::size_t k = 0; k < kProbePoints; ++k) {
    for (auto& v : x) v = probe.uniform(0.0, kTwoPi);
    sup = std::max(sup, std::abs(out.target(x)));
  }
  data.b_bound = sup + half_width;
  data.meta = "synthetic seed=" + std::to_string(spec.seed) + " stream=" + std::to_string(spec.data_stream) +
              " n=" + std::to_string(spec.n) + " sigma=" + io::format_number(spec.sigma);
  data.validate();
  return out;
}

std::pair<double, bool> p_max_of(const FrequencyDistribution& dist) {
  try {
    return {dist.p_max(), true};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Capacity) throw;
    return {dist.p_max_upper_bound(), false};
  }
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  return s;
}

std::string kind_tag(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Numeric: return "numeric";
    default: return "io";
  }
}

struct CellCoords {
  std::size_t dist, n, lambda, M, seed;
};

CellCoords decode(const SweepConfig& cfg, std::size_t idx) {
  CellCoords c{};
  c.seed = idx % cfg.seeds.size();
  idx /= cfg.seeds.size();
  c.M = idx % cfg.Ms.size();
  idx /= cfg.Ms.size();
  c.lambda = idx % cfg.lambdas.size();
  idx /= cfg.lambdas.size();
  c.n = idx % cfg.ns.size();
  c.dist = idx / cfg.ns.size();
  return c;
}

std::string experiment_id(const SweepConfig& cfg, const CellCoords& c) {
  const auto& lam = cfg.lambdas[c.lambda];
  return cfg.dists[c.dist].label + "-M" + std::to_string(cfg.Ms[c.M]) + "-n" + std::to_string(cfg.ns[c.n]) + "-l" +
         (lam ? io::format_number(*lam) : std::string("auto")) + "-s" + std::to_string(cfg.seeds[c.seed]);
}

ResultRow run_cell_with(const SweepConfig& cfg, std::size_t cell_index, const TrigPolynomial& target, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  const auto c = decode(cfg, cell_index);
  const auto& sd = cfg.dists[c.dist];
  ResultRow row;
  row.experiment_id = experiment_id(cfg, c);
  row.d = cfg.problem.fs->dim();
  row.omega_size = cfg.problem.fs->half_size();
  row.dist_kind = sd.label;
  row.M = cfg.Ms[c.M];
  row.n = cfg.ns[c.n];
  row.seed = cfg.seeds[c.seed];
  row.lambda = cfg.lambdas[c.lambda].value_or(1.0 / std::sqrt(static_cast<double>(row.n)));
  row.krr_true_risk = row.risk_gap = kNaN;
  try {
    ProblemSpec spec = cfg.problem;
    spec.n = row.n;
    spec.seed = row.seed;
    spec.data_stream = cfg.master_seed;
    const auto gp = generate_with_target(spec, target);
    SeededRng rng(cfg.master_seed, cell_index);
    const auto model = rff_fit(gp.data, *sd.dist, row.M, row.lambda, rng);
    row.emp_risk = empirical_risk(model, gp.data);
    row.l2_err_sq = l2_error_sq(model, gp.target);
    row.true_risk = row.l2_err_sq + gp.noise_variance;
    const double norm = coefficient_norm_sq(gp.target);
    row.rel_l2_err = norm > 0.0 ? row.l2_err_sq / norm : kNaN;
    row.alignment = alignment(gp.target, *sd.dist);
    row.p_max = p_max_of(*sd.dist).first;
    if (cfg.krr && row.omega_size <= kKrrHalfCap && row.n <= kKrrSampleCap) {
      const auto w = weights_of(sd.dist->dense_pmf());
      const KernelSpec kernel{cfg.problem.encoding, cfg.problem.fs, w};
      const auto krr = kernel_ridge_fit(gp.data, kernel, row.lambda);
      row.krr_true_risk = l2_error_sq(krr, gp.target) + gp.noise_variance;
      row.risk_gap = row.true_risk - row.krr_true_risk;
    }
  } catch (const Error& e) {
    row.status = "error:" + kind_tag(e.kind()) + ":" + sanitize(e.what());
  } catch (const std::exception& e) {
    row.status = "error:internal:" + sanitize(e.what());
  }
  if (timing)
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::size_t resolve_threads(std::size_t requested, std::size_t cells) {
  std::size_t t = requested;
  if (t == 0) {
    if (const char* env = std::getenv("RFFDQ_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      require(end != env && *end == '\0' && v >= 1, ErrorKind::Config, "RFFDQ_THREADS must be a positive integer");
      t = static_cast<std::size_t>(v);
    } else {
      t = std::max(1u, std::thread::hardware_concurrency());
    }
  }
  return std::max<std::size_t>(1, std::min(t, cells));
}

// Evaluates the listed cells on a pool; sink(row) is called on the calling thread, in list order.
template <typename Sink>
void evaluate_cells(const SweepConfig& cfg, const std::vector<std::size_t>& cells, const RunOptions& opt, Sink sink) {
  if (cells.empty()) return;
  const TrigPolynomial target = materialize_target(cfg.problem);
  const std::size_t workers = resolve_threads(opt.threads, cells.size());
  std::vector<std::optional<ResultRow>> slots(cells.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= cells.size() || stop.load()) return;
        ResultRow row = run_cell_with(cfg, cells[k], target, opt.timing);
        {
          std::lock_guard lock(mu);
          slots[k] = std::move(row);
        }
        cv.notify_all();
      }
    });
  std::size_t written = 0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return slots[k].has_value(); });
    ResultRow row = std::move(*slots[k]);
    slots[k].reset();
    lock.unlock();
    sink(row);
    if (opt.stop_after && ++written >= *opt.stop_after) {
      stop = true;
      break;
    }
  }
  for (auto& t : pool) t.join();
}

std::string field(double v) { return std::isnan(v) ? "nan" : io::format_number(v); }

double parse_field(const std::string& s) {
  if (s == "nan") return kNaN;
  return std::stod(s);
}

}  // namespace

ProblemSpec problem_from_json(const io::json& j) {
  require(j.is_object(), ErrorKind::Config, "problem must be an object");
  ProblemSpec spec;
  const auto& t = j.contains("target") ? j.at("target") : io::json::object();
  const std::string kind = t.value("kind", "random");
  if (kind == "circuit") {
    auto [circuit, obs] = io::circuit_from_json(t.at("circuit"));
    spec.target.kind = TargetSource::Kind::Circuit;
    spec.target.circuit = std::move(circuit);
    spec.target.observable = std::move(obs);
    spec.target.theta = t.contains("theta") ? io::theta_from_json(t.at("theta")) : std::vector<double>{};
  }
  if (j.contains("encoding")) {
    spec.encoding = io::encoding_from_json(j.at("encoding"));
  } else {
    require(spec.target.circuit.has_value(), ErrorKind::Config, "problem needs an 'encoding' (or a circuit target)");
    spec.encoding = encoding_of(*spec.target.circuit);
  }
  spec.fs = std::make_shared<const FrequencySet>(FrequencySet::build(spec.encoding));
  if (spec.target.circuit)
    require(FrequencySet::build(encoding_of(*spec.target.circuit), false).same_lattice(*spec.fs), ErrorKind::Config,
            "circuit encoding does not match the problem encoding");

  if (kind == "explicit") {
    spec.target.kind = TargetSource::Kind::Explicit;
    spec.target.poly = io::trig_from_json(t.at("function"), spec.fs);
  } else if (kind == "random") {
    spec.target.kind = TargetSource::Kind::Random;
    spec.target.support_size = t.contains("support") ? as_count(t.at("support"), "support") : 1;
    if (t.contains("from"))
      spec.target.support_from =
          std::make_shared<const FrequencyDistribution>(io::distribution_from_json(t.at("from"), spec.fs));
  } else {
    require(kind == "circuit", ErrorKind::Config, "unknown target kind '" + kind + "'");
  }
  if (t.contains("seed")) spec.target.seed = as_seed(t.at("seed"), "target seed");

  if (j.contains("noise")) {
    const auto& nz = j.at("noise");
    const std::string nk = nz.value("kind", "none");
    if (nk == "uniform") {
      spec.sigma = nz.value("sigma", 0.0);
      require(std::isfinite(spec.sigma) && spec.sigma >= 0.0, ErrorKind::Config, "noise sigma must be nonnegative");
    } else {
      require(nk == "none", ErrorKind::Config, "noise kind must be 'none' or 'uniform'");
    }
  }
  if (j.contains("n")) spec.n = as_count(j.at("n"), "n");
  if (j.contains("seed")) spec.seed = as_seed(j.at("seed"), "seed");
  return spec;
}

TrigPolynomial materialize_target(const ProblemSpec& spec) {
  switch (spec.target.kind) {
    case TargetSource::Kind::Explicit:
      require(spec.target.poly.has_value(), ErrorKind::Config, "explicit target missing");
      require(spec.target.poly->freq_set().same_lattice(*spec.fs), ErrorKind::Config,
              "target support is not contained in the encoding lattice");
      return *spec.target.poly;
    case TargetSource::Kind::Circuit: {
      const auto f = extract_trig_polynomial(*spec.target.circuit, spec.target.observable, spec.target.theta);
      return TrigPolynomial(spec.fs, f.coeffs());
    }
    default: return random_target(spec);
  }
}

GeneratedProblem generate_problem(const ProblemSpec& spec) { return generate_with_target(spec, materialize_target(spec)); }

double l2_error_sq(const FittedModel& model, const TrigPolynomial& target) {
  const auto& fs = target.freq_set_ptr();
  if (fs->is_integer() && fs->materialized()) {
    try {
      const auto spec = model_spectrum(model, fs);
      double s = std::norm(spec.coeff(0) - target.coeff(0));
      for (std::size_t i = 1; i < spec.size(); ++i) s += 2.0 * std::norm(spec.coeff(i) - target.coeff(i));
      return s;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Config) throw;
    }
  }
  return true_risk_estimate(model, target, 0.0).l2_sq;
}

SweepConfig sweep_from_json(const io::json& j) {
  require(j.is_object() && j.value("schema_version", 0) == io::kSchemaVersion, ErrorKind::Config,
          "sweep config needs \"schema_version\": " + std::to_string(io::kSchemaVersion));
  SweepConfig cfg;
  require(j.contains("problem"), ErrorKind::Config, "sweep config needs a 'problem'");
  cfg.problem = problem_from_json(j.at("problem"));
  require(j.contains("axes") && j.at("axes").is_object(), ErrorKind::Config, "sweep config needs 'axes'");
  const auto& axes = j.at("axes");
  auto list = [&](const char* key) -> const io::json& {
    require(axes.contains(key) && axes.at(key).is_array() && !axes.at(key).empty(), ErrorKind::Config,
            std::string("axis '") + key + "' must be a nonempty array");
    return axes.at(key);
  };
  std::set<std::string> labels;
  for (const auto& d : list("dist")) {
    SweepDist sd;
    sd.dist = std::make_shared<const FrequencyDistribution>(io::distribution_from_json(d, cfg.problem.fs));
    sd.label = d.value("label", sd.dist->kind_name());
    require(!sd.label.empty() && sd.label.find_first_of(",\n\"") == std::string::npos, ErrorKind::Config,
            "distribution labels must be nonempty and free of commas and quotes");
    require(labels.insert(sd.label).second, ErrorKind::Config, "duplicate distribution label '" + sd.label + "'");
    cfg.dists.push_back(std::move(sd));
  }
  for (const auto& m : list("M")) {
    cfg.Ms.push_back(as_count(m, "M"));
    require(cfg.Ms.back() >= 1, ErrorKind::Config, "M must be at least 1");
  }
  if (axes.contains("n")) {
    for (const auto& n : list("n")) {
      cfg.ns.push_back(as_count(n, "n"));
      require(cfg.ns.back() >= 1, ErrorKind::Config, "n must be at least 1");
    }
  } else {
    cfg.ns.push_back(cfg.problem.n);
  }
  if (axes.contains("lambda")) {
    for (const auto& l : list("lambda")) {
      if (l.is_string()) {
        require(l.get<std::string>() == "auto", ErrorKind::Config, "lambda must be a number or \"auto\"");
        cfg.lambdas.push_back(std::nullopt);
      } else {
        require(l.is_number() && l.get<double>() >= 0.0, ErrorKind::Config, "lambda must be nonnegative");
        cfg.lambdas.push_back(l.get<double>());
      }
    }
  } else {
    cfg.lambdas.push_back(std::nullopt);
  }
  if (axes.contains("seed")) {
    for (const auto& s : list("seed")) cfg.seeds.push_back(as_seed(s, "seed"));
  } else {
    cfg.seeds.push_back(cfg.problem.seed);
  }
  cfg.krr = j.value("krr", false);
  if (j.contains("master_seed")) cfg.master_seed = as_seed(j.at("master_seed"), "master_seed");
  return cfg;
}

std::size_t cell_count(const SweepConfig& cfg) {
  return cfg.dists.size() * cfg.ns.size() * cfg.lambdas.size() * cfg.Ms.size() * cfg.seeds.size();
}

ResultRow run_cell(const SweepConfig& cfg, std::size_t cell_index, bool timing) {
  require(cell_index < cell_count(cfg), ErrorKind::Config, "cell index out of range");
  return run_cell_with(cfg, cell_index, materialize_target(cfg.problem), timing);
}

std::vector<ResultRow> run_sweep(const SweepConfig& cfg, const RunOptions& opt) {
  std::vector<std::size_t> cells(cell_count(cfg));
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
  std::vector<ResultRow> rows;
  evaluate_cells(cfg, cells, opt, [&](const ResultRow& r) { rows.push_back(r); });
  return rows;
}

std::vector<ResultRow> run_sweep(const SweepConfig& cfg, const std::string& out_path, const RunOptions& opt) {
  std::set<std::string> done;
  std::vector<ResultRow> rows;
  const bool have_file = opt.resume && std::filesystem::exists(out_path);
  if (have_file) {
    std::string text = io::read_text_file(out_path);
    // a killed writer may leave a partial last line
    const auto last = text.find_last_of('\n');
    text.resize(last == std::string::npos ? 0 : last + 1);
    if (text.empty()) {
      text = results_header();
    } else {
      require(text.rfind(results_header(), 0) == 0, ErrorKind::Config,
              "existing results file has a different schema; refusing to resume");
    }
    io::write_text_file(out_path, text);
    rows = results_from_csv(text);
    for (const auto& r : rows) done.insert(r.experiment_id);
  } else {
    io::write_text_file(out_path, results_header());
  }

  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < cell_count(cfg); ++i)
    if (!done.count(experiment_id(cfg, decode(cfg, i)))) cells.push_back(i);

  std::ofstream out(out_path, std::ios::binary | std::ios::app);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot append to '" + out_path + "'");
  evaluate_cells(cfg, cells, opt, [&](const ResultRow& r) {
    out << row_to_csv(r);
    out.flush();
    require(static_cast<bool>(out), ErrorKind::Io, "write to '" + out_path + "' failed");
    rows.push_back(r);
  });
  return rows;
}

std::string results_header() {
  return "# rffdq results schema_version=" + std::to_string(io::kSchemaVersion) +
         "\nexperiment_id,d,omega_size,dist_kind,M,n,lambda,seed,emp_risk,true_risk,krr_true_risk,risk_gap,"
         "l2_err_sq,rel_l2_err,alignment,p_max,runtime_ms,status\n";
}

std::string row_to_csv(const ResultRow& r) {
  std::ostringstream os;
  os << r.experiment_id << ',' << r.d << ',' << r.omega_size << ',' << r.dist_kind << ',' << r.M << ',' << r.n << ','
     << field(r.lambda) << ',' << r.seed << ',' << field(r.emp_risk) << ',' << field(r.true_risk) << ','
     << field(r.krr_true_risk) << ',' << field(r.risk_gap) << ',' << field(r.l2_err_sq) << ','
     << field(r.rel_l2_err) << ',' << field(r.alignment) << ',' << field(r.p_max) << ',' << field(r.runtime_ms)
     << ',' << r.status << '\n';
  return os.str();
}

std::vector<ResultRow> results_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<ResultRow> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      require(line.rfind("experiment_id,", 0) == 0, ErrorKind::Config, "results file lacks the expected header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    require(cells.size() == 18, ErrorKind::Config, "results row has " + std::to_string(cells.size()) + " columns");
    try {
      ResultRow r;
      r.experiment_id = cells[0];
      r.d = std::stoull(cells[1]);
      r.omega_size = std::stoull(cells[2]);
      r.dist_kind = cells[3];
      r.M = std::stoull(cells[4]);
      r.n = std::stoull(cells[5]);
      r.lambda = parse_field(cells[6]);
      r.seed = std::stoull(cells[7]);
      r.emp_risk = parse_field(cells[8]);
      r.true_risk = parse_field(cells[9]);
      r.krr_true_risk = parse_field(cells[10]);
      r.risk_gap = parse_field(cells[11]);
      r.l2_err_sq = parse_field(cells[12]);
      r.rel_l2_err = parse_field(cells[13]);
      r.alignment = parse_field(cells[14]);
      r.p_max = parse_field(cells[15]);
      r.runtime_ms = parse_field(cells[16]);
      r.status = cells[17];
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      fail(ErrorKind::Config, "malformed results row: " + line);
    }
  }
  return rows;
}

PlotKind plot_kind_from_name(const std::string& name) {
  if (name == "risk_vs_M") return PlotKind::RiskVsM;
  if (name == "risk_vs_n") return PlotKind::RiskVsN;
  if (name == "alignment_scatter") return PlotKind::AlignmentScatter;
  fail(ErrorKind::Config, "unknown plot kind '" + name + "' (expected risk_vs_M, risk_vs_n or alignment_scatter)");
}

namespace {

constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Axis {
  double lo, hi;
  bool log;

  static Axis fit(const std::vector<double>& values) {
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    Axis a{*mn, *mx, *mn > 0.0 && *mx / *mn > 10.0};
    if (a.log) {
      a.lo = std::pow(10.0, std::floor(std::log10(a.lo)));
      a.hi = std::pow(10.0, std::ceil(std::log10(a.hi)));
    } else if (a.hi == a.lo) {
      const double pad = a.lo == 0.0 ? 1.0 : std::abs(a.lo) * 0.1;
      a.lo -= pad;
      a.hi += pad;
    } else {
      const double pad = (a.hi - a.lo) * 0.05;
      a.lo -= pad;
      a.hi += pad;
    }
    return a;
  }

  double unit(double v) const {
    return log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo)) : (v - lo) / (hi - lo);
  }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (double e = std::log10(lo); e <= std::log10(hi) + 1e-9; e += 1.0) t.push_back(std::pow(10.0, e));
    } else {
      for (int i = 0; i <= 4; ++i) t.push_back(lo + (hi - lo) * i / 4.0);
    }
    return t;
  }
};

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::string emit_plot(const std::vector<ResultRow>& rows, PlotKind kind) {
  struct Point {
    double x, y;
  };
  std::map<std::string, std::vector<Point>> series;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    double x = 0.0;
    switch (kind) {
      case PlotKind::RiskVsM: x = static_cast<double>(r.M); break;
      case PlotKind::RiskVsN: x = static_cast<double>(r.n); break;
      case PlotKind::AlignmentScatter: x = r.alignment; break;
    }
    if (std::isfinite(x) && std::isfinite(r.true_risk)) series[r.dist_kind].push_back({x, r.true_risk});
  }
  require(!series.empty(), ErrorKind::Config, "no plottable rows in the results table");

  std::vector<double> xs, ys;
  for (const auto& [label, pts] : series)
    for (const auto& p : pts) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
  const Axis ax = Axis::fit(xs), ay = Axis::fit(ys);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + pw * ax.unit(x); };
  auto py = [&](double y) { return kTop + ph * (1.0 - ay.unit(y)); };

  const char* xlabel = kind == PlotKind::RiskVsM ? "M (frequency samples)"
                       : kind == PlotKind::RiskVsN ? "n (data samples)"
                                                   : "alignment";
  const char* title = kind == PlotKind::RiskVsM ? "true risk vs M"
                      : kind == PlotKind::RiskVsN ? "true risk vs n"
                                                  : "true risk vs alignment";
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  svg << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks())
    svg << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(kTop + ph) << "\" x2=\"" << fmt(px(t)) << "\" y2=\""
        << fmt(kTop + ph + 5) << "\" stroke=\"black\"/><text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(kTop + ph + 18)
        << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  for (double t : ay.ticks())
    svg << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
        << fmt(py(t)) << "\" stroke=\"black\"/><text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py(t) + 4)
        << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 10) << "\" text-anchor=\"middle\">" << xlabel
      << (ax.log ? " (log)" : "") << "</text>\n";
  svg << "<text transform=\"translate(16 " << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">true risk"
      << (ay.log ? " (log)" : "") << "</text>\n";

  std::size_t color = 0;
  for (const auto& [label, pts] : series) {
    const char* c = kPalette[color % std::size(kPalette)];
    const double ly = kTop + 14.0 + 16.0 * static_cast<double>(color);
    ++color;
    svg << "<g>\n";
    if (kind == PlotKind::AlignmentScatter || pts.size() == 1) {
      for (const auto& p : pts)
        svg << "<circle cx=\"" << fmt(px(p.x)) << "\" cy=\"" << fmt(py(p.y)) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    } else {
      std::map<double, std::vector<double>> by_x;
      for (const auto& p : pts) by_x[p.x].push_back(p.y);
      std::string upper, lower, median;
      for (const auto& [x, v] : by_x) {
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        upper += fmt(px(x)) + "," + fmt(py(*mx)) + " ";
        median += fmt(px(x)) + "," + fmt(py(median_of(v))) + " ";
      }
      for (auto it = by_x.rbegin(); it != by_x.rend(); ++it) {
        const auto mn = *std::min_element(it->second.begin(), it->second.end());
        lower += fmt(px(it->first)) + "," + fmt(py(mn)) + " ";
      }
      svg << "<polygon points=\"" << upper << lower << "\" fill=\"" << c << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
      svg << "<polyline points=\"" << median << "\" fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
      for (const auto& [x, v] : by_x)
        svg << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(median_of(v))) << "\" r=\"3\" fill=\"" << c
            << "\"/>\n";
    }
    svg << "<rect x=\"" << fmt(kWidth - kRight + 12) << "\" y=\"" << fmt(ly - 8) << "\" width=\"10\" height=\"10\" fill=\""
        << c << "\"/><text x=\"" << fmt(kWidth - kRight + 27) << "\" y=\"" << fmt(ly) << "\">" << label << "</text>\n";
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace rffdq
