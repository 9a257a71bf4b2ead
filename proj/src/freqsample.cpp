#include "rffdq/freqsample.hpp"

#include <algorithm>
#include <cmath>

#include "rffdq/error.hpp"

namespace rffdq {

namespace {

constexpr double kSumTolerance = 1e-12;

void check_pmf(std::span<const double> p, const std::string& what) {
  double s = 0.0;
  for (double v : p) {
    require(std::isfinite(v) && v >= 0.0, ErrorKind::Config, what + ": probabilities must be finite and nonnegative");
    s += v;
  }
  require(std::abs(s - 1.0) <= kSumTolerance * std::max<std::size_t>(1, p.size()), ErrorKind::Config,
          what + ": probabilities must sum to 1 (got " + std::to_string(s) + ")");
}

// v <- v * G[:, k, :]
std::vector<double> advance(std::span<const double> v, const MpsCore& core, std::size_t k) {
  std::vector<double> out(core.right, 0.0);
  for (std::size_t a = 0; a < core.left; ++a) {
    if (v[a] == 0.0) continue;
    for (std::size_t b = 0; b < core.right; ++b) out[b] += v[a] * core.at(a, k, b);
  }
  return out;
}

double weight_of(std::span<const double> left, const MpsCore& core, std::size_t k, std::span<const double> right) {
  double s = 0.0;
  for (std::size_t a = 0; a < core.left; ++a) {
    if (left[a] == 0.0) continue;
    double inner = 0.0;
    for (std::size_t b = 0; b < core.right; ++b) inner += core.at(a, k, b) * right[b];
    s += left[a] * inner;
  }
  return s;
}

}  // namespace

FrequencyDistribution FrequencyDistribution::explicit_dist(std::shared_ptr<const FrequencySet> fs,
                                                           std::vector<std::pair<std::uint64_t, double>> entries) {
  require(fs != nullptr, ErrorKind::Config, "distribution needs a frequency set");
  std::sort(entries.begin(), entries.end());
  ExplicitRep rep;
  for (const auto& [idx, prob] : entries) {
    require(idx < fs->half_size(), ErrorKind::Config, "explicit support index outside Omega_D");
    require(std::isfinite(prob) && prob >= 0.0, ErrorKind::Config, "explicit probabilities must be nonnegative");
    if (prob == 0.0) continue;
    if (!rep.entries.empty() && rep.entries.back().first == idx)
      rep.entries.back().second += prob;
    else
      rep.entries.emplace_back(idx, prob);
  }
  std::vector<double> probs;
  for (const auto& e : rep.entries) probs.push_back(e.second);
  require(!probs.empty(), ErrorKind::Config, "explicit distribution has no mass");
  check_pmf(probs, "explicit distribution");
  double acc = 0.0;
  for (double p : probs) rep.cumulative.push_back(acc += p);
  FrequencyDistribution d(Kind::Explicit, std::move(fs));
  d.rep_ = std::move(rep);
  return d;
}

FrequencyDistribution FrequencyDistribution::explicit_dense(std::shared_ptr<const FrequencySet> fs,
                                                            std::span<const double> p) {
  require(fs != nullptr && p.size() == fs->half_size(), ErrorKind::Config,
          "dense probability vector length does not match |Omega_D|");
  std::vector<std::pair<std::uint64_t, double>> entries;
  for (std::size_t i = 0; i < p.size(); ++i) entries.emplace_back(i, p[i]);
  return explicit_dist(std::move(fs), std::move(entries));
}

FrequencyDistribution FrequencyDistribution::product(std::shared_ptr<const FrequencySet> fs,
                                                     std::vector<std::vector<double>> per_dim) {
  require(fs != nullptr, ErrorKind::Config, "distribution needs a frequency set");
  require(per_dim.size() == fs->dim(), ErrorKind::Config, "product distribution needs one pmf per dimension");
  for (std::size_t j = 0; j < per_dim.size(); ++j) {
    require(per_dim[j].size() == fs->component_size(j), ErrorKind::Config,
            "product pmf for dimension " + std::to_string(j) + " has wrong length");
    check_pmf(per_dim[j], "product pmf " + std::to_string(j));
  }
  FrequencyDistribution d(Kind::ProductInduced, std::move(fs));
  d.rep_ = ProductRep{std::move(per_dim)};
  return d;
}

FrequencyDistribution FrequencyDistribution::mps(std::shared_ptr<const FrequencySet> fs, std::vector<MpsCore> cores) {
  require(fs != nullptr, ErrorKind::Config, "distribution needs a frequency set");
  const std::size_t d = fs->dim();
  require(cores.size() == d, ErrorKind::Config, "MPS needs one core per dimension");
  for (std::size_t j = 0; j < d; ++j) {
    const auto& c = cores[j];
    require(c.phys == fs->component_size(j), ErrorKind::Config,
            "MPS core " + std::to_string(j) + " physical dimension does not match |Omega~^(j)|");
    require(c.left >= 1 && c.right >= 1 && c.data.size() == c.left * c.phys * c.right, ErrorKind::Config,
            "MPS core " + std::to_string(j) + " has inconsistent shape");
    if (j == 0) require(c.left == 1, ErrorKind::Config, "first MPS core must have left bond 1");
    if (j + 1 == d) require(c.right == 1, ErrorKind::Config, "last MPS core must have right bond 1");
    if (j > 0) require(cores[j - 1].right == c.left, ErrorKind::Config, "MPS bond dimensions do not chain");
    for (double v : c.data)
      require(std::isfinite(v) && v >= 0.0, ErrorKind::Config, "MPS core entries must be finite and nonnegative");
  }
  MpsRep rep;
  rep.cores = std::move(cores);
  rep.right_env.resize(d);
  rep.right_env[d - 1] = {1.0};
  for (std::size_t j = d - 1; j-- > 0;) {
    const auto& next = rep.cores[j + 1];
    std::vector<double> env(next.left, 0.0);
    for (std::size_t a = 0; a < next.left; ++a)
      for (std::size_t k = 0; k < next.phys; ++k)
        for (std::size_t b = 0; b < next.right; ++b) env[a] += next.at(a, k, b) * rep.right_env[j + 1][b];
    rep.right_env[j] = std::move(env);
  }
  const std::vector<double> one{1.0};
  for (std::size_t k = 0; k < rep.cores[0].phys; ++k) rep.total_mass += weight_of(one, rep.cores[0], k, rep.right_env[0]);
  require(std::isfinite(rep.total_mass) && rep.total_mass > 0.0, ErrorKind::Numeric,
          "MPS total mass must be finite and positive");
  FrequencyDistribution dist(Kind::MpsInduced, std::move(fs));
  dist.rep_ = std::move(rep);
  return dist;
}

std::string FrequencyDistribution::kind_name() const {
  switch (kind_) {
    case Kind::Explicit: return "explicit";
    case Kind::ProductInduced: return "product";
    case Kind::MpsInduced: return "mps";
  }
  return "unknown";
}

double FrequencyDistribution::full_pmf_coords(std::span<const std::size_t> coords) const {
  switch (kind_) {
    case Kind::Explicit:
      return full_pmf_flat(fs_->flat_of(coords));
    case Kind::ProductInduced: {
      const auto& rep = std::get<ProductRep>(rep_);
      double p = 1.0;
      for (std::size_t j = 0; j < coords.size(); ++j) p *= rep.per_dim[j][coords[j]];
      return p;
    }
    case Kind::MpsInduced: {
      const auto& rep = std::get<MpsRep>(rep_);
      std::vector<double> v{1.0};
      for (std::size_t j = 0; j < coords.size(); ++j) v = advance(v, rep.cores[j], coords[j]);
      return v[0] / rep.total_mass;
    }
  }
  return 0.0;
}

double FrequencyDistribution::full_pmf_flat(std::uint64_t flat) const {
  require(flat < fs_->full_size(), ErrorKind::Config, "flat lattice index out of range");
  if (kind_ == Kind::Explicit) {
    if (flat < fs_->centre_flat()) return 0.0;
    return pmf_index(flat - fs_->centre_flat());
  }
  const auto coords = fs_->coords_of(flat);
  return full_pmf_coords(coords);
}

double FrequencyDistribution::pmf_index(std::uint64_t half_index) const {
  require(half_index < fs_->half_size(), ErrorKind::Config, "half index outside Omega_D");
  if (kind_ == Kind::Explicit) {
    const auto& e = std::get<ExplicitRep>(rep_).entries;
    auto it = std::lower_bound(e.begin(), e.end(), std::make_pair(half_index, -1.0));
    return (it != e.end() && it->first == half_index) ? it->second : 0.0;
  }
  const std::uint64_t flat = fs_->centre_flat() + half_index;
  const double q = full_pmf_coords(fs_->coords_of(flat));
  if (half_index == 0) return q;
  return q + full_pmf_coords(fs_->coords_of(fs_->full_size() - 1 - flat));
}

double FrequencyDistribution::pmf(std::span<const double> omega) const {
  auto idx = fs_->index_of(omega);
  require(idx.has_value(), ErrorKind::Config, "frequency is not a canonical lattice point");
  return pmf_index(*idx);
}

std::vector<double> FrequencyDistribution::dense_pmf(std::uint64_t cap) const {
  require(fs_->half_size() <= cap, ErrorKind::Capacity, "canonical half too large for a dense pmf");
  std::vector<double> p(fs_->half_size());
  for (std::uint64_t i = 0; i < p.size(); ++i) p[i] = pmf_index(i);
  return p;
}

double FrequencyDistribution::p_max(std::uint64_t cap) const {
  if (kind_ == Kind::Explicit) {
    double m = 0.0;
    for (const auto& e : std::get<ExplicitRep>(rep_).entries) m = std::max(m, e.second);
    return m;
  }
  const auto p = dense_pmf(cap);
  return *std::max_element(p.begin(), p.end());
}

double FrequencyDistribution::p_max_upper_bound() const {
  if (kind_ == Kind::ProductInduced) {
    double b = 2.0;
    for (const auto& pj : std::get<ProductRep>(rep_).per_dim) b *= *std::max_element(pj.begin(), pj.end());
    return std::min(1.0, b);
  }
  return p_max();
}

double FrequencyDistribution::mps_total_mass() const {
  require(kind_ == Kind::MpsInduced, ErrorKind::Config, "not an MPS distribution");
  return std::get<MpsRep>(rep_).total_mass;
}

std::vector<double> FrequencyDistribution::mps_marginal(std::size_t j, std::span<const std::size_t> prefix) const {
  require(kind_ == Kind::MpsInduced, ErrorKind::Config, "marginals are only defined for MPS distributions");
  const auto& rep = std::get<MpsRep>(rep_);
  require(j < rep.cores.size(), ErrorKind::Config, "marginal dimension out of range");
  require(prefix.size() == j, ErrorKind::Config, "prefix must assign exactly the preceding dimensions");
  std::vector<double> left{1.0};
  for (std::size_t i = 0; i < j; ++i) {
    require(prefix[i] < rep.cores[i].phys, ErrorKind::Config, "prefix coordinate out of range");
    left = advance(left, rep.cores[i], prefix[i]);
  }
  const auto& core = rep.cores[j];
  std::vector<double> w(core.phys);
  double total = 0.0;
  for (std::size_t k = 0; k < core.phys; ++k) total += (w[k] = weight_of(left, core, k, rep.right_env[j]));
  require(total > 0.0 && std::isfinite(total), ErrorKind::Numeric,
          "zero conditional mass: prefix is unreachable under the MPS cores");
  for (double& v : w) v /= total;
  return w;
}

std::uint64_t FrequencyDistribution::fold_flat(std::uint64_t flat) const {
  return flat < fs_->centre_flat() ? fs_->full_size() - 1 - flat : flat;
}

std::uint64_t FrequencyDistribution::sample_flat(SeededRng& rng) const {
  switch (kind_) {
    case Kind::Explicit: {
      const auto& rep = std::get<ExplicitRep>(rep_);
      const double u = rng.uniform() * rep.cumulative.back();
      auto it = std::upper_bound(rep.cumulative.begin(), rep.cumulative.end(), u);
      const std::size_t pos = std::min<std::size_t>(it - rep.cumulative.begin(), rep.entries.size() - 1);
      return fs_->centre_flat() + rep.entries[pos].first;
    }
    case Kind::ProductInduced: {
      const auto& rep = std::get<ProductRep>(rep_);
      std::vector<std::size_t> coords(rep.per_dim.size());
      for (std::size_t j = 0; j < coords.size(); ++j) coords[j] = rng.categorical(rep.per_dim[j]);
      return fs_->flat_of(coords);
    }
    case Kind::MpsInduced: {
      const auto& rep = std::get<MpsRep>(rep_);
      std::vector<double> left{1.0};
      std::vector<std::size_t> coords(rep.cores.size());
      std::vector<double> w;
      for (std::size_t j = 0; j < rep.cores.size(); ++j) {
        const auto& core = rep.cores[j];
        w.assign(core.phys, 0.0);
        double total = 0.0;
        for (std::size_t k = 0; k < core.phys; ++k) total += (w[k] = weight_of(left, core, k, rep.right_env[j]));
        require(total > 0.0 && std::isfinite(total), ErrorKind::Numeric, "zero conditional mass during MPS sampling");
        coords[j] = rng.categorical(w);
        left = advance(left, core, coords[j]);
        double s = 0.0;
        for (double v : left) s += v;
        require(s > 0.0, ErrorKind::Numeric, "zero conditional mass during MPS sampling");
        for (double& v : left) v /= s;
      }
      return fs_->flat_of(coords);
    }
  }
  return 0;
}

std::vector<std::uint64_t> FrequencyDistribution::sample_indices(SeededRng& rng, std::size_t count) const {
  require(count >= 1, ErrorKind::Config, "sample count must be at least 1");
  std::vector<std::uint64_t> out(count);
  for (auto& idx : out) idx = fold_flat(sample_flat(rng)) - fs_->centre_flat();
  return out;
}

std::vector<Frequency> FrequencyDistribution::sample(SeededRng& rng, std::size_t count) const {
  const auto idx = sample_indices(rng, count);
  std::vector<Frequency> out;
  out.reserve(count);
  for (auto i : idx) out.push_back(fs_->frequency_of_half_index(i));
  return out;
}

const std::vector<std::pair<std::uint64_t, double>>& FrequencyDistribution::explicit_entries() const {
  require(kind_ == Kind::Explicit, ErrorKind::Config, "not an explicit distribution");
  return std::get<ExplicitRep>(rep_).entries;
}

const std::vector<std::vector<double>>& FrequencyDistribution::product_pmfs() const {
  require(kind_ == Kind::ProductInduced, ErrorKind::Config, "not a product distribution");
  return std::get<ProductRep>(rep_).per_dim;
}

const std::vector<MpsCore>& FrequencyDistribution::mps_cores() const {
  require(kind_ == Kind::MpsInduced, ErrorKind::Config, "not an MPS distribution");
  return std::get<MpsRep>(rep_).cores;
}

FrequencyDistribution uniform_distribution(std::shared_ptr<const FrequencySet> fs, UniformKind kind) {
  require(fs != nullptr, ErrorKind::Config, "distribution needs a frequency set");
  if (kind == UniformKind::LazyProduct) {
    std::vector<std::vector<double>> per_dim;
    for (std::size_t j = 0; j < fs->dim(); ++j) {
      const auto n = fs->component_size(j);
      per_dim.emplace_back(n, 1.0 / static_cast<double>(n));
    }
    return FrequencyDistribution::product(std::move(fs), std::move(per_dim));
  }
  require(fs->half_size() <= 10'000'000, ErrorKind::Capacity, "canonical half too large for an explicit uniform");
  const std::uint64_t n = fs->half_size();
  std::vector<std::pair<std::uint64_t, double>> entries;
  entries.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) entries.emplace_back(i, 1.0 / static_cast<double>(n));
  return FrequencyDistribution::explicit_dist(std::move(fs), std::move(entries));
}

}  // namespace rffdq
