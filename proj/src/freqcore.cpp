#include "rffdq/freqcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rffdq/error.hpp"

namespace rffdq {

namespace {

constexpr double kLookupTolerance = 1e-9;

void dedupe_sorted(std::vector<double>& values, double tol) {
  if (values.empty()) return;
  std::size_t out = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] - values[out] > tol) values[++out] = values[i];
  }
  values.resize(out + 1);
}

bool nearly_integer(double v) { return std::abs(v - std::round(v)) <= kFrequencyTolerance; }

}  // namespace

HamiltonianSpectrum::HamiltonianSpectrum(std::vector<double> values) : eigenvalues(std::move(values)) {
  require(!eigenvalues.empty(), ErrorKind::Config, "Hamiltonian spectrum must be nonempty");
  for (double v : eigenvalues) require(std::isfinite(v), ErrorKind::Config, "non-finite eigenvalue");
  require(std::is_sorted(eigenvalues.begin(), eigenvalues.end()), ErrorKind::Config,
          "Hamiltonian spectrum must be sorted ascending");
}

void EncodingStrategy::validate() const {
  require(!per_dimension.empty(), ErrorKind::Config, "encoding strategy needs at least one dimension");
  for (const auto& dim : per_dimension) {
    for (const auto& spec : dim) {
      require(!spec.eigenvalues.empty(), ErrorKind::Config, "empty Hamiltonian spectrum");
      require(std::is_sorted(spec.eigenvalues.begin(), spec.eigenvalues.end()), ErrorKind::Config,
              "Hamiltonian spectrum must be sorted ascending");
    }
  }
}

std::vector<double> component_frequency_set(std::span<const HamiltonianSpectrum> spectra, std::size_t cap) {
  std::vector<double> sums{0.0};
  for (const auto& spec : spectra) {
    std::vector<double> next;
    next.reserve(sums.size() * spec.eigenvalues.size());
    for (double s : sums)
      for (double lam : spec.eigenvalues) next.push_back(s + lam);
    std::sort(next.begin(), next.end());
    dedupe_sorted(next, kFrequencyTolerance);
    // |S - S| >= |S|, so an oversized sum set already implies an oversized difference set
    if (next.size() > cap)
      fail(ErrorKind::Capacity, "frequency set for one dimension exceeds cap of " + std::to_string(cap));
    sums = std::move(next);
  }

  std::vector<double> positive;
  positive.reserve(sums.size() * sums.size() / 2 + 1);
  for (std::size_t i = 0; i < sums.size(); ++i)
    for (std::size_t k = 0; k < i; ++k) {
      const double diff = sums[i] - sums[k];
      if (diff > kFrequencyTolerance) positive.push_back(diff);
    }
  std::sort(positive.begin(), positive.end());
  dedupe_sorted(positive, kFrequencyTolerance);
  if (2 * positive.size() + 1 > cap)
    fail(ErrorKind::Capacity, "frequency set for one dimension exceeds cap of " + std::to_string(cap));

  std::vector<double> out;
  out.reserve(2 * positive.size() + 1);
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) out.push_back(-*it);
  out.push_back(0.0);
  out.insert(out.end(), positive.begin(), positive.end());
  return out;
}

FrequencySet FrequencySet::build(const EncodingStrategy& enc, bool materialize, FrequencySetLimits limits) {
  enc.validate();
  std::vector<std::vector<double>> per_dim;
  per_dim.reserve(enc.dim());
  for (const auto& dim : enc.per_dimension)
    per_dim.push_back(component_frequency_set(dim, limits.per_dimension_cap));
  return from_components(std::move(per_dim), materialize, limits);
}

FrequencySet FrequencySet::from_components(std::vector<std::vector<double>> per_dimension, bool materialize,
                                           FrequencySetLimits limits) {
  require(!per_dimension.empty(), ErrorKind::Config, "frequency set needs at least one dimension");
  FrequencySet fs;
  fs.per_dim_ = std::move(per_dimension);
  const std::size_t d = fs.per_dim_.size();
  fs.strides_.assign(d, 1);
  long double full = 1.0L;
  for (std::size_t j = 0; j < d; ++j) {
    const auto& set = fs.per_dim_[j];
    require(!set.empty() && set.size() % 2 == 1, ErrorKind::Config,
            "per-dimension frequency set must be symmetric with odd size");
    for (std::size_t k = 0; k < set.size(); ++k) {
      require(std::abs(set[k] + set[set.size() - 1 - k]) <= kLookupTolerance, ErrorKind::Config,
              "per-dimension frequency set must be symmetric about 0");
      if (!nearly_integer(set[k])) fs.is_integer_ = false;
      if (k > 0)
        require(set[k] > set[k - 1], ErrorKind::Config, "per-dimension frequency set must be strictly increasing");
    }
    full *= static_cast<long double>(set.size());
    require(full < 9e18L, ErrorKind::Capacity, "frequency lattice size overflows 64 bits");
  }
  fs.full_size_ = static_cast<std::uint64_t>(full);
  for (std::size_t j = d; j-- > 1;) fs.strides_[j - 1] = fs.strides_[j] * fs.per_dim_[j].size();

  if (materialize) {
    if (fs.full_size_ > limits.materialize_cap)
      fail(ErrorKind::Capacity, "frequency lattice of size " + std::to_string(fs.full_size_) +
                                    " exceeds materialization cap; use lazy or sampling workflows");
    const std::uint64_t half = fs.half_size();
    fs.half_.reserve(half);
    for (std::uint64_t i = 0; i < half; ++i) fs.half_.push_back(fs.frequency_of_half_index(i));
    fs.materialized_ = true;
  }
  return fs;
}

std::size_t FrequencySet::min_component_size() const noexcept {
  std::size_t m = per_dim_.front().size();
  for (const auto& s : per_dim_) m = std::min(m, s.size());
  return m;
}

std::size_t FrequencySet::max_component_size() const noexcept {
  std::size_t m = 0;
  for (const auto& s : per_dim_) m = std::max(m, s.size());
  return m;
}

const std::vector<Frequency>& FrequencySet::half() const {
  if (!materialized_) fail(ErrorKind::Capacity, "frequency set was built lazily; canonical half not materialized");
  return half_;
}

Frequency FrequencySet::frequency_of_half_index(std::uint64_t i) const {
  require(i < half_size(), ErrorKind::Config, "half index out of range");
  const auto coords = coords_of(centre_flat() + i);
  return frequency_of_coords(coords);
}

std::uint64_t FrequencySet::flat_of(std::span<const std::size_t> coords) const {
  std::uint64_t flat = 0;
  for (std::size_t j = 0; j < coords.size(); ++j) flat += coords[j] * strides_[j];
  return flat;
}

std::vector<std::size_t> FrequencySet::coords_of(std::uint64_t flat) const {
  std::vector<std::size_t> coords(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    coords[j] = static_cast<std::size_t>(flat / strides_[j]);
    flat %= strides_[j];
  }
  return coords;
}

Frequency FrequencySet::frequency_of_coords(std::span<const std::size_t> coords) const {
  Frequency omega(dim());
  for (std::size_t j = 0; j < dim(); ++j) omega[j] = per_dim_[j][coords[j]];
  return omega;
}

std::optional<std::vector<std::size_t>> FrequencySet::lattice_coords(std::span<const double> omega) const {
  if (omega.size() != dim()) return std::nullopt;
  std::vector<std::size_t> coords(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    const auto& set = per_dim_[j];
    auto it = std::lower_bound(set.begin(), set.end(), omega[j] - kLookupTolerance);
    if (it == set.end() || std::abs(*it - omega[j]) > kLookupTolerance) return std::nullopt;
    coords[j] = static_cast<std::size_t>(it - set.begin());
  }
  return coords;
}

std::optional<std::uint64_t> FrequencySet::index_of(std::span<const double> omega) const {
  auto coords = lattice_coords(omega);
  if (!coords) return std::nullopt;
  const std::uint64_t flat = flat_of(*coords);
  if (flat < centre_flat()) return std::nullopt;
  return flat - centre_flat();
}

std::optional<std::uint64_t> FrequencySet::folded_index_of(std::span<const double> omega) const {
  auto coords = lattice_coords(omega);
  if (!coords) return std::nullopt;
  std::uint64_t flat = flat_of(*coords);
  if (flat < centre_flat()) flat = full_size_ - 1 - flat;
  return flat - centre_flat();
}

bool FrequencySet::same_lattice(const FrequencySet& other) const {
  if (dim() != other.dim()) return false;
  for (std::size_t j = 0; j < dim(); ++j) {
    if (per_dim_[j].size() != other.per_dim_[j].size()) return false;
    for (std::size_t k = 0; k < per_dim_[j].size(); ++k)
      if (std::abs(per_dim_[j][k] - other.per_dim_[j][k]) > kLookupTolerance) return false;
  }
  return true;
}

bool is_canonical(std::span<const double> omega) {
  for (double v : omega) {
    if (v > kFrequencyTolerance) return true;
    if (v < -kFrequencyTolerance) return false;
  }
  return true;  // omega0
}

FoldResult canonical_fold(std::span<const double> omega) {
  FoldResult r{Frequency(omega.begin(), omega.end()), 1};
  if (!is_canonical(omega)) {
    for (double& v : r.omega) v = -v;
    r.sign = -1;
  }
  for (double& v : r.omega)
    if (v == 0.0) v = 0.0;  // normalise -0.0
  return r;
}

}  // namespace rffdq
