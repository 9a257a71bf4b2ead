#include <doctest.h>

#include <numbers>

#include "rffdq/error.hpp"
#include "rffdq/pqcsim.hpp"
#include "oracles/circuits.hpp"
#include "rffdq/rng.hpp"

using namespace rffdq;
using doctest::Approx;
using namespace oracle;

namespace {

constexpr double kPi = std::numbers::pi;

Observable z0() { return Observable{{{1.0, "Z"}}}; }

}  // namespace

TEST_CASE("model evaluation examples") {
  Circuit c(1, {encode("X", 0.5, 0)});
  for (double x : {0.0, 0.4, 2.0, 5.5}) CHECK(evaluate_model(c, z0(), {}, std::span<const double>(&x, 1)) == Approx(std::cos(x)));
  Circuit empty(1, {});
  const double x = 1.0;
  CHECK(evaluate_model(empty, z0(), {}, std::span<const double>(&x, 1)) == 1.0);
  Circuit phase(1, {encode("Z", 1.0, 0)});
  CHECK(evaluate_model(phase, z0(), {}, std::span<const double>(&x, 1)) == Approx(1.0));

  std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(evaluate_model(c, z0(), {}, wrong), Error);
  Circuit needs_theta(1, {rot("Y", 0)});
  CHECK_THROWS_AS(evaluate_model(needs_theta, z0(), {}, std::span<const double>(&x, 1)), Error);
}

TEST_CASE("circuit validation") {
  CHECK_THROWS_AS(Circuit(15, {}), Error);
  CHECK_THROWS_AS(Circuit(2, {encode("XYZ", 0.5, 0)}), Error);
  CHECK_THROWS_AS(Circuit(1, {encode("Q", 0.5, 0)}), Error);
  CHECK_THROWS_AS(Circuit(1, {encode("", 0.5, 0)}), Error);
  GateSpec cn;
  cn.kind = GateSpec::Kind::Cnot;
  cn.control = 0;
  cn.target = 0;
  CHECK_THROWS_AS(Circuit(2, {cn}), Error);
  GateSpec fixed;
  fixed.kind = GateSpec::Kind::Fixed;
  fixed.qubits = {0};
  fixed.matrix = {1, 1, 0, 1};
  CHECK_THROWS_AS(Circuit(1, {fixed}), Error);
}

TEST_CASE("encoding summary") {
  Circuit one(1, {encode("X", 0.5, 0)});
  auto e1 = encoding_of(one);
  REQUIRE(e1.dim() == 1);
  REQUIRE(e1.per_dimension[0].size() == 1);
  CHECK(e1.per_dimension[0][0].eigenvalues == std::vector<double>{-0.5, 0.5});

  Circuit three(1, {encode("X", 0.5, 0), encode("X", 0.5, 0), encode("X", 0.5, 0)});
  CHECK(encoding_of(three).per_dimension[0].size() == 3);

  Circuit two(2, {encode("XI", 0.5, 0), encode("IZ", -0.5, 1)});
  auto e2 = encoding_of(two);
  CHECK(e2.dim() == 2);
  CHECK(e2.per_dimension[1][0].eigenvalues == std::vector<double>{-0.5, 0.5});
}

TEST_CASE("spectrum extraction examples") {
  Circuit c(1, {encode("X", 0.5, 0)});
  auto f = extract_trig_polynomial(c, z0(), {});
  REQUIRE(f.size() == 2);
  CHECK(std::abs(f.coeff(0)) <= 1e-10);
  CHECK(std::abs(f.coeff(1) - 0.5) <= 1e-10);

  Circuit empty(1, {});
  auto g = extract_trig_polynomial(empty, z0(), {});
  CHECK(std::abs(g.coeff(0) - 1.0) <= 1e-12);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(std::abs(g.coeff(i)) <= 1e-12);

  Circuit layered(1, {encode("X", 0.5, 0), rot("Y", 0), encode("X", 0.5, 0)});
  std::vector<double> theta{0.9};
  auto ex = extract_spectrum(layered, z0(), theta);
  CHECK(ex.poly.freq_set().per_dimension()[0] == std::vector<double>{-2, -1, 0, 1, 2});
  CHECK(ex.off_lattice_max <= kOffLatticeTolerance);
  CHECK(ex.conjugate_asymmetry <= kConjugateTolerance);
  CHECK_NOTHROW(check_extraction(ex));

  Circuit irrational(1, {encode("X", std::sqrt(2.0), 0)});
  CHECK_THROWS_AS(extract_trig_polynomial(irrational, z0(), {}), Error);
  CHECK_THROWS_AS(extract_trig_polynomial(layered, z0(), theta, 3), Error);
}

TEST_CASE("property: simulator agrees with dense matrices and preserves norm") {
  SeededRng rng(606);
  for (int t = 0; t < 40; ++t) {
    auto rc = random_circuit(rng);
    Circuit c(rc.q, rc.gates);
    for (int k = 0; k < 3; ++k) {
      std::vector<double> x(rc.d);
      for (auto& v : x) v = rng.uniform(0, 2 * kPi);
      const double ref = dense_model(rc.q, rc.gates, rc.obs, rc.theta, x);
      CHECK(std::abs(evaluate_model(c, rc.obs, rc.theta, x) - ref) <= 1e-10);
    }
  }
  StateVector psi(3);
  for (int t = 0; t < 200; ++t) {
    switch (rng.below(4)) {
      case 0: psi.apply_pauli_rotation(random_word(3, rng), rng.uniform(0, 2 * kPi)); break;
      case 1: psi.apply_cnot(0, 2); break;
      case 2: psi.apply_cz(1, 2); break;
      default: {
        std::vector<std::size_t> qs{2, 0};
        auto u = random_unitary(4, rng);
        psi.apply_matrix(qs, u);
      }
    }
    CHECK(std::abs(psi.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("property: extracted spectra live on the lattice, are real and bounded") {
  SeededRng rng(707);
  for (int t = 0; t < 50; ++t) {
    auto rc = random_circuit(rng);
    Circuit c(rc.q, rc.gates);
    auto ex = extract_spectrum(c, rc.obs, rc.theta);
    CHECK(ex.off_lattice_max <= kOffLatticeTolerance);
    CHECK(ex.conjugate_asymmetry <= kConjugateTolerance);
    const double bound = rc.obs.inf_norm_bound();
    CHECK(ex.grid_max_abs <= bound + 1e-9);
    auto lattice = FrequencySet::build(encoding_of(c));
    CHECK(ex.poly.freq_set().same_lattice(lattice));
    for (int k = 0; k < 5; ++k) {
      std::vector<double> x(rc.d);
      for (auto& v : x) v = rng.uniform(0, 2 * kPi);
      CHECK(std::abs(ex.poly(x) - evaluate_model(c, rc.obs, rc.theta, x)) <= 1e-8);
    }
    if (t < 5) {
      double sup = 0.0;
      for (int k = 0; k < 10000; ++k) {
        std::vector<double> x(rc.d);
        for (auto& v : x) v = rng.uniform(0, 2 * kPi);
        sup = std::max(sup, std::abs(ex.poly(x)));
      }
      CHECK(sup <= bound + 1e-8);
    }
  }
}
