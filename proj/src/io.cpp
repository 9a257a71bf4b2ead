#include "rffdq/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rffdq/error.hpp"

namespace rffdq::io {

namespace {

double get_number(const json& j, const char* what) {
  require(j.is_number(), ErrorKind::Config, std::string(what) + " must be a number");
  return j.get<double>();
}

std::vector<double> number_array(const json& j, const char* what) {
  require(j.is_array(), ErrorKind::Config, std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(get_number(v, what));
  return out;
}

const json& member(const json& j, const char* key) {
  require(j.is_object() && j.contains(key), ErrorKind::Config, std::string("missing field '") + key + "'");
  return j.at(key);
}

std::shared_ptr<const FrequencySet> lattice_for(const json& j, std::shared_ptr<const FrequencySet> fs) {
  if (fs) return fs;
  require(j.is_object() && j.contains("encoding"), ErrorKind::Config,
          "frequency lattice unknown: supply an encoding or embed an 'encoding' member");
  return std::make_shared<const FrequencySet>(FrequencySet::build(encoding_from_json(j.at("encoding"))));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

json matrix_rows(const Eigen::MatrixXd& X) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < X.cols(); ++c) row.push_back(X(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_rows(const json& j, const char* what) {
  require(j.is_array() && !j.empty(), ErrorKind::Config, std::string(what) + " must be a nonempty array of rows");
  const std::size_t cols = j.at(0).size();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = number_array(j.at(r), what);
    require(row.size() == cols, ErrorKind::Config, std::string(what) + " rows have unequal lengths");
    for (std::size_t c = 0; c < cols; ++c) X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return X;
}

Eigen::VectorXd vector_from(const json& j, const char* what) {
  const auto v = number_array(j, what);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json vector_to(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json kernel_to_json(const KernelSpec& k) {
  return {{"encoding", encoding_to_json(k.encoding)}, {"weights", k.weights.values()}};
}

KernelSpec kernel_from_json(const json& j) {
  return KernelSpec::make(encoding_from_json(member(j, "encoding")), number_array(member(j, "weights"), "weights"));
}

}  // namespace

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("invalid JSON: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) { return parse_json(read_text_file(path)); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
  require(static_cast<bool>(out), ErrorKind::Io, "write to '" + path + "' failed");
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

EncodingStrategy encoding_from_json(const json& j) {
  const json& dims = member(j, "dimensions");
  require(dims.is_array() && !dims.empty(), ErrorKind::Config, "'dimensions' must be a nonempty array");
  EncodingStrategy enc;
  for (const auto& spectra : dims) {
    require(spectra.is_array(), ErrorKind::Config, "each dimension must be an array of spectra");
    std::vector<HamiltonianSpectrum> list;
    for (const auto& s : spectra) {
      auto values = number_array(s, "spectrum");
      std::sort(values.begin(), values.end());
      list.emplace_back(std::move(values));
    }
    enc.per_dimension.push_back(std::move(list));
  }
  enc.validate();
  return enc;
}

json encoding_to_json(const EncodingStrategy& enc) {
  json dims = json::array();
  for (const auto& spectra : enc.per_dimension) {
    json list = json::array();
    for (const auto& s : spectra) list.push_back(s.eigenvalues);
    dims.push_back(std::move(list));
  }
  return {{"dimensions", std::move(dims)}};
}

TrigPolynomial trig_from_json(const json& j, std::shared_ptr<const FrequencySet> fs) {
  fs = lattice_for(j, std::move(fs));
  if (j.contains("d"))
    require(static_cast<std::size_t>(get_number(j.at("d"), "d")) == fs->dim(), ErrorKind::Config,
            "function dimension does not match the lattice");
  std::vector<Complex> c(fs->half_size());
  for (const auto& t : member(j, "terms")) {
    const auto omega = number_array(member(t, "omega"), "omega");
    require(omega.size() == fs->dim(), ErrorKind::Config, "term frequency has the wrong dimension");
    const double re = get_number(member(t, "re"), "re");
    const double im = t.contains("im") ? get_number(t.at("im"), "im") : 0.0;
    auto idx = fs->index_of(omega);
    require(idx.has_value(), ErrorKind::Config, "term frequency is off the lattice or not in the canonical half");
    c[*idx] += Complex(re, im);
  }
  return TrigPolynomial(std::move(fs), std::move(c));
}

json trig_to_json(const TrigPolynomial& f, const EncodingStrategy* enc) {
  json terms = json::array();
  for (std::size_t i : f.support(0.0)) {
    const auto c = f.coeff(i);
    terms.push_back({{"omega", f.freq_set().half_at(i)}, {"re", c.real()}, {"im", c.imag()}});
  }
  json out = {{"d", f.dim()}, {"terms", std::move(terms)}};
  if (enc) out["encoding"] = encoding_to_json(*enc);
  return out;
}

std::vector<double> weights_from_json(const json& j) {
  if (j.is_array()) return number_array(j, "weights");
  return number_array(member(j, "weights"), "weights");
}

FrequencyDistribution distribution_from_json(const json& j, std::shared_ptr<const FrequencySet> fs) {
  fs = lattice_for(j, std::move(fs));
  const std::string kind = member(j, "kind").get<std::string>();
  if (kind == "explicit") {
    if (j.contains("p")) {
      const auto p = number_array(j.at("p"), "p");
      return FrequencyDistribution::explicit_dense(fs, p);
    }
    std::vector<std::pair<std::uint64_t, double>> entries;
    if (j.contains("support")) {
      const auto& support = member(j, "support");
      const auto probs = number_array(member(j, "probs"), "probs");
      require(support.is_array() && support.size() == probs.size(), ErrorKind::Config,
              "'support' and 'probs' must have equal length");
      for (std::size_t i = 0; i < probs.size(); ++i) {
        const auto omega = number_array(support[i], "support");
        require(omega.size() == fs->dim(), ErrorKind::Config, "support frequency has the wrong dimension");
        auto idx = fs->index_of(omega);
        require(idx.has_value(), ErrorKind::Config, "support frequency is off the lattice or not canonical");
        entries.emplace_back(*idx, probs[i]);
      }
      return FrequencyDistribution::explicit_dist(fs, std::move(entries));
    }
    for (const auto& e : member(j, "entries")) {
      const auto omega = number_array(member(e, "omega"), "omega");
      require(omega.size() == fs->dim(), ErrorKind::Config, "entry frequency has the wrong dimension");
      auto idx = fs->index_of(omega);
      require(idx.has_value(), ErrorKind::Config, "entry frequency is off the lattice or not canonical");
      entries.emplace_back(*idx, get_number(member(e, "p"), "p"));
    }
    return FrequencyDistribution::explicit_dist(fs, std::move(entries));
  }
  if (kind == "product") {
    std::vector<std::vector<double>> per_dim;
    for (const auto& pj : member(j, "per_dim")) per_dim.push_back(number_array(pj, "per_dim"));
    return FrequencyDistribution::product(fs, std::move(per_dim));
  }
  if (kind == "mps") {
    std::vector<MpsCore> cores;
    for (const auto& c : member(j, "cores")) {
      if (c.is_array()) {
        // nested [left][phys][right]
        MpsCore core;
        core.left = c.size();
        require(core.left > 0 && c[0].is_array() && !c[0].empty() && c[0][0].is_array(), ErrorKind::Config,
                "nested MPS core must be a nonempty 3-level array");
        core.phys = c[0].size();
        core.right = c[0][0].size();
        for (const auto& row : c) {
          require(row.is_array() && row.size() == core.phys, ErrorKind::Config, "ragged MPS core");
          for (const auto& col : row) {
            const auto vals = number_array(col, "cores");
            require(vals.size() == core.right, ErrorKind::Config, "ragged MPS core");
            core.data.insert(core.data.end(), vals.begin(), vals.end());
          }
        }
        cores.push_back(std::move(core));
        continue;
      }
      const auto shape = number_array(member(c, "shape"), "shape");
      require(shape.size() == 3, ErrorKind::Config, "MPS core shape must have three entries");
      MpsCore core{static_cast<std::size_t>(shape[0]), static_cast<std::size_t>(shape[1]),
                   static_cast<std::size_t>(shape[2]), number_array(member(c, "data"), "data")};
      cores.push_back(std::move(core));
    }
    return FrequencyDistribution::mps(fs, std::move(cores));
  }
  if (kind == "uniform") {
    const std::string variant = j.value("variant", "explicit");
    require(variant == "explicit" || variant == "lazy", ErrorKind::Config, "uniform variant must be explicit or lazy");
    return uniform_distribution(fs, variant == "lazy" ? UniformKind::LazyProduct : UniformKind::Explicit);
  }
  fail(ErrorKind::Config, "unknown distribution kind '" + kind + "'");
}

json distribution_to_json(const FrequencyDistribution& dist) {
  json out = {{"kind", dist.kind_name()}};
  switch (dist.kind()) {
    case FrequencyDistribution::Kind::Explicit: {
      json support = json::array(), probs = json::array();
      for (const auto& [idx, p] : dist.explicit_entries()) {
        support.push_back(dist.freq_set().frequency_of_half_index(idx));
        probs.push_back(p);
      }
      out["support"] = std::move(support);
      out["probs"] = std::move(probs);
      break;
    }
    case FrequencyDistribution::Kind::ProductInduced: out["per_dim"] = dist.product_pmfs(); break;
    case FrequencyDistribution::Kind::MpsInduced: {
      json cores = json::array();
      for (const auto& c : dist.mps_cores()) {
        json core = json::array();
        for (std::size_t a = 0; a < c.left; ++a) {
          json row = json::array();
          for (std::size_t k = 0; k < c.phys; ++k) {
            json col = json::array();
            for (std::size_t b = 0; b < c.right; ++b) col.push_back(c.at(a, k, b));
            row.push_back(std::move(col));
          }
          core.push_back(std::move(row));
        }
        cores.push_back(std::move(core));
      }
      out["cores"] = std::move(cores);
      break;
    }
  }
  return out;
}

std::pair<Circuit, Observable> circuit_from_json(const json& j) {
  const auto qubits = static_cast<std::size_t>(get_number(member(j, "qubits"), "qubits"));
  std::vector<GateSpec> gates;
  for (const auto& g : member(j, "gates")) {
    const std::string kind = member(g, "kind").get<std::string>();
    GateSpec spec;
    if (kind == "encode") {
      spec.kind = GateSpec::Kind::Encoding;
      spec.pauli = member(g, "pauli").get<std::string>();
      spec.scale = get_number(member(g, "scale"), "scale");
      const double dim = get_number(member(g, "dim"), "dim");
      require(dim >= 1.0 && dim == std::floor(dim), ErrorKind::Config, "encoding 'dim' is 1-based and integral");
      spec.dim = static_cast<std::size_t>(dim) - 1;
    } else if (kind == "rot") {
      spec.kind = GateSpec::Kind::Rotation;
      spec.pauli = member(g, "pauli").get<std::string>();
      const double idx = get_number(member(g, "theta"), "theta");
      require(idx >= 0.0 && idx == std::floor(idx), ErrorKind::Config, "rotation 'theta' is a parameter index");
      spec.theta_index = static_cast<std::size_t>(idx);
    } else if (kind == "cnot" || kind == "cz") {
      spec.kind = kind == "cnot" ? GateSpec::Kind::Cnot : GateSpec::Kind::Cz;
      spec.control = static_cast<std::size_t>(get_number(member(g, "c"), "c"));
      spec.target = static_cast<std::size_t>(get_number(member(g, "t"), "t"));
    } else if (kind == "fixed") {
      spec.kind = GateSpec::Kind::Fixed;
      for (const auto& q : member(g, "qubits")) spec.qubits.push_back(static_cast<std::size_t>(get_number(q, "qubits")));
      for (const auto& row : member(g, "matrix")) {
        require(row.is_array(), ErrorKind::Config, "matrix rows must be arrays");
        for (const auto& e : row) {
          if (e.is_array()) {
            require(e.size() == 2, ErrorKind::Config, "complex matrix entries are [re, im]");
            spec.matrix.emplace_back(get_number(e.at(0), "matrix"), get_number(e.at(1), "matrix"));
          } else {
            spec.matrix.emplace_back(get_number(e, "matrix"), 0.0);
          }
        }
      }
    } else {
      fail(ErrorKind::Config, "unknown gate kind '" + kind + "'");
    }
    gates.push_back(std::move(spec));
  }
  const auto inputs = j.contains("inputs") ? static_cast<std::size_t>(get_number(j.at("inputs"), "inputs")) : 0;
  Circuit circuit(qubits, std::move(gates), inputs);
  Observable obs;
  for (const auto& t : member(member(j, "observable"), "terms")) {
    const double coef = get_number(member(t, "coef"), "coef");
    require(std::isfinite(coef), ErrorKind::Config, "observable coefficients must be finite");
    std::string word = member(t, "pauli").get<std::string>();
    require(!word.empty() && word.size() <= qubits, ErrorKind::Config, "observable Pauli word has the wrong length");
    obs.terms.emplace_back(coef, std::move(word));
  }
  return {std::move(circuit), std::move(obs)};
}

std::vector<double> theta_from_json(const json& j) {
  if (j.is_array()) return number_array(j, "theta");
  return number_array(member(j, "theta"), "theta");
}

json model_to_json(const FittedModel& model) {
  json out = {{"schema_version", kSchemaVersion}, {"kind", model.kind_name()}, {"lambda", model.lambda()}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExplicitLinearModel>) {
          out["kernel"] = kernel_to_json(m.kernel);
          out["hyperplane"] = vector_to(m.hyperplane);
        } else if constexpr (std::is_same_v<T, KrrModel>) {
          out["kernel"] = kernel_to_json(m.kernel);
          out["train_x"] = matrix_rows(m.train_x);
          out["alpha"] = vector_to(m.alpha);
        } else {
          out["frequencies"] = m.features.frequencies;
          out["phases"] = m.features.phases;
          out["weights"] = vector_to(m.weights);
        }
      },
      model.variant());
  return out;
}

FittedModel model_from_json(const json& j) {
  require(j.is_object() && j.value("schema_version", 0) == kSchemaVersion, ErrorKind::Config,
          "unsupported model schema version");
  const std::string kind = member(j, "kind").get<std::string>();
  const double lambda = get_number(member(j, "lambda"), "lambda");
  if (kind == "explicit_linear") {
    auto kernel = kernel_from_json(member(j, "kernel"));
    auto v = vector_from(member(j, "hyperplane"), "hyperplane");
    require(v.size() == static_cast<Eigen::Index>(2 * kernel.fs->positive_size() + 1), ErrorKind::Config,
            "hyperplane length does not match the kernel");
    return FittedModel(ExplicitLinearModel{std::move(kernel), std::move(v)}, lambda);
  }
  if (kind == "krr") {
    auto kernel = kernel_from_json(member(j, "kernel"));
    auto X = matrix_from_rows(member(j, "train_x"), "train_x");
    auto alpha = vector_from(member(j, "alpha"), "alpha");
    require(alpha.size() == X.rows(), ErrorKind::Config, "alpha length does not match train_x");
    return FittedModel(KrrModel{std::move(kernel), std::move(X), std::move(alpha)}, lambda);
  }
  if (kind == "rff") {
    RffFeatureSet f;
    for (const auto& w : member(j, "frequencies")) f.frequencies.push_back(number_array(w, "frequencies"));
    f.phases = number_array(member(j, "phases"), "phases");
    auto w = vector_from(member(j, "weights"), "weights");
    require(f.phases.size() == f.frequencies.size() && w.size() == static_cast<Eigen::Index>(f.size()),
            ErrorKind::Config, "RFF model arrays have inconsistent lengths");
    return FittedModel(RffModel{std::move(f), std::move(w)}, lambda);
  }
  fail(ErrorKind::Config, "unknown model kind '" + kind + "'");
}

Dataset dataset_from_csv(const std::string& text, std::string meta) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_line(line);
    break;
  }
  require(header.size() >= 2 && header.back() == "y", ErrorKind::Config, "dataset header must be x_1,...,x_d,y");
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 0; j < d; ++j)
    require(header[j] == "x_" + std::to_string(j + 1), ErrorKind::Config, "dataset header must be x_1,...,x_d,y");
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_line(line);
    require(cells.size() == d + 1, ErrorKind::Config, "dataset line " + std::to_string(lineno) + " has the wrong width");
    std::vector<double> row(d + 1);
    for (std::size_t c = 0; c <= d; ++c)
      require(parse_double(cells[c], row[c]), ErrorKind::Config,
              "dataset line " + std::to_string(lineno) + ": bad number '" + cells[c] + "'");
    rows.push_back(std::move(row));
  }
  Dataset data;
  data.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  data.Y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) data.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    data.Y(static_cast<Eigen::Index>(r)) = rows[r][d];
  }
  data.b_bound = data.Y.size() ? data.Y.cwiseAbs().maxCoeff() : 0.0;
  data.meta = std::move(meta);
  data.validate();
  return data;
}

std::string dataset_to_csv(const Dataset& data) {
  std::string out;
  for (std::size_t j = 0; j < data.dim(); ++j) out += "x_" + std::to_string(j + 1) + ",";
  out += "y\n";
  for (Eigen::Index r = 0; r < data.X.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.X.cols(); ++c) out += format_number(data.X(r, c)) + ",";
    out += format_number(data.Y(r)) + "\n";
  }
  return out;
}

Eigen::MatrixXd points_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const auto cells = split_line(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t c = 0; c < cells.size(); ++c) numeric = numeric && parse_double(cells[c], row[c]);
    if (!numeric) {
      require(rows.empty(), ErrorKind::Config, "non-numeric row in point file");
      continue;  // header
    }
    require(rows.empty() || row.size() == rows.front().size(), ErrorKind::Config, "point rows have unequal widths");
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorKind::Config, "point file is empty");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return X;
}

json bounds_to_json(const BoundsReport& r) {
  return {{"inputs", {{"op_norm", r.inputs.op_norm}, {"C", r.inputs.C}, {"b", r.inputs.b}, {"eps", r.inputs.eps},
                      {"delta", r.inputs.delta}}},
          {"n0", r.n0},
          {"c0", r.c0},
          {"c1", r.c1},
          {"n_min", r.n_min},
          {"M_min", r.m_min},
          {"notes", r.notes}};
}

json lower_bound_to_json(const LowerBoundReport& r) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"p_max", r.p_max},
          {"p_max_exact", r.p_max_exact},
          {"alignment", r.alignment},
          {"coeff_norm_sq", r.coeff_norm_sq},
          {"l2_sq", r.l2_sq},
          {"eps_hat", r.eps_hat},
          {"M_required_pmax", finite_or_null(r.m_required_pmax)},
          {"M_required_alignment", finite_or_null(r.m_required_alignment)},
          {"integer_lattice", r.integer_lattice},
          {"vacuous", r.vacuous}};
}

json feasibility_to_json(const FeasibilityReport& r) {
  json out = {{"verdict", verdict_name(r.verdict)}, {"d", r.dim},          {"budget", r.budget},
              {"p_max", r.p_max},                   {"p_max_exact", r.p_max_exact}, {"p_max_note", r.p_max_note},
              {"notes", r.notes}};
  out["rkhs_norm"] = r.rkhs_norm ? json(*r.rkhs_norm) : json(nullptr);
  out["sufficient"] = r.sufficient ? bounds_to_json(*r.sufficient) : json(nullptr);
  out["lower"] = r.lower ? lower_bound_to_json(*r.lower) : json(nullptr);
  return out;
}

}  // namespace rffdq::io
