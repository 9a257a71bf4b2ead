#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rffdq {

using Frequency = std::vector<double>;

inline constexpr double kFrequencyTolerance = 1e-12;

/// Eigenvalues of one encoding Hamiltonian, sorted ascending. Degenerate values allowed.
struct HamiltonianSpectrum {
  std::vector<double> eigenvalues;

  HamiltonianSpectrum() = default;
  explicit HamiltonianSpectrum(std::vector<double> values);
};

/// Per input dimension, the spectra of every Hamiltonian that encodes that component.
/// An empty list for dimension j means x_j is never encoded.
struct EncodingStrategy {
  std::vector<std::vector<HamiltonianSpectrum>> per_dimension;

  std::size_t dim() const noexcept { return per_dimension.size(); }
  void validate() const;
};

struct FrequencySetLimits {
  std::size_t per_dimension_cap = 4096;
  std::uint64_t materialize_cap = 10'000'000;
};

/// All differences of all sums of one eigenvalue per spectrum, deduplicated at
/// kFrequencyTolerance and sorted. Always symmetric about 0 and contains 0.
std::vector<double> component_frequency_set(std::span<const HamiltonianSpectrum> spectra,
                                            std::size_t cap = FrequencySetLimits{}.per_dimension_cap);

/// The full lattice (Cartesian product of the per-dimension sets) together with its
/// canonical half. A frequency is canonical iff it is zero or its first nonzero
/// component is positive.
///
/// Lattice points are addressed by row-major flat index over per-dimension coordinates
/// (dimension 0 most significant). Because every per-dimension set is symmetric, the
/// mirror of flat index f is full_size-1-f and omega0 sits at the centre, so the
/// canonical half is exactly the flats >= centre. Half index i is flat centre+i: omega0
/// first, then the remaining canonical frequencies in lexicographic order.
class FrequencySet {
 public:
  static FrequencySet build(const EncodingStrategy& enc, bool materialize = true,
                            FrequencySetLimits limits = {});
  static FrequencySet from_components(std::vector<std::vector<double>> per_dimension,
                                      bool materialize = true, FrequencySetLimits limits = {});

  std::size_t dim() const noexcept { return per_dim_.size(); }
  const std::vector<std::vector<double>>& per_dimension() const noexcept { return per_dim_; }
  std::size_t component_size(std::size_t j) const { return per_dim_.at(j).size(); }
  std::uint64_t full_size() const noexcept { return full_size_; }
  std::uint64_t half_size() const noexcept { return (full_size_ - 1) / 2 + 1; }
  std::uint64_t positive_size() const noexcept { return half_size() - 1; }
  bool is_integer() const noexcept { return is_integer_; }
  bool materialized() const noexcept { return materialized_; }
  std::size_t min_component_size() const noexcept;
  std::size_t max_component_size() const noexcept;

  /// Materialized canonical half; throws Capacity if the set was built lazily.
  const std::vector<Frequency>& half() const;
  const Frequency& half_at(std::size_t i) const { return half().at(i); }

  /// Frequency for a half index, computed without requiring materialization.
  Frequency frequency_of_half_index(std::uint64_t i) const;

  std::uint64_t centre_flat() const noexcept { return (full_size_ - 1) / 2; }
  std::uint64_t flat_of(std::span<const std::size_t> coords) const;
  std::vector<std::size_t> coords_of(std::uint64_t flat) const;
  Frequency frequency_of_coords(std::span<const std::size_t> coords) const;
  std::size_t zero_coord(std::size_t j) const { return (per_dim_.at(j).size() - 1) / 2; }

  /// Per-dimension coordinates of omega, or nullopt if omega is off the lattice.
  std::optional<std::vector<std::size_t>> lattice_coords(std::span<const double> omega) const;
  /// Half index of a canonical lattice frequency; nullopt if off-lattice or not canonical.
  std::optional<std::uint64_t> index_of(std::span<const double> omega) const;
  /// Half index of the canonical representative of omega (omega or -omega).
  std::optional<std::uint64_t> folded_index_of(std::span<const double> omega) const;
  bool contains(std::span<const double> omega) const { return lattice_coords(omega).has_value(); }

  bool same_lattice(const FrequencySet& other) const;

 private:
  std::vector<std::vector<double>> per_dim_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t full_size_ = 1;
  bool is_integer_ = true;
  bool materialized_ = false;
  std::vector<Frequency> half_;
};

struct FoldResult {
  Frequency omega;
  int sign;
};

bool is_canonical(std::span<const double> omega);
/// Returns (omega', s) with omega' canonical and s*omega' == omega.
FoldResult canonical_fold(std::span<const double> omega);

}  // namespace rffdq
