#include <doctest.h>

#include <Eigen/Dense>
#include <numbers>

#include "oracles/brute_force.hpp"
#include "rffdq/error.hpp"
#include "rffdq/kernelmap.hpp"
#include "rffdq/rng.hpp"

using namespace rffdq;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const FrequencySet> lattice(std::vector<std::vector<double>> per_dim) {
  return std::make_shared<const FrequencySet>(FrequencySet::from_components(std::move(per_dim)));
}

std::shared_ptr<const FrequencySet> line(int kmax) {
  std::vector<double> s;
  for (int k = -kmax; k <= kmax; ++k) s.push_back(k);
  return lattice({s});
}

TrigPolynomial cosine_at(const std::shared_ptr<const FrequencySet>& fs, std::size_t i, double amp = 1.0) {
  auto f = TrigPolynomial::zero(fs);
  f.set_coeff(i, i == 0 ? amp : amp / 2.0);
  return f;
}

TrigPolynomial random_poly(const std::shared_ptr<const FrequencySet>& fs, SeededRng& rng) {
  std::vector<Complex> c(fs->half_size());
  c[0] = rng.uniform(-1, 1);
  for (std::size_t i = 1; i < c.size(); ++i) c[i] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return TrigPolynomial(fs, c);
}

std::vector<double> random_point(std::size_t d, SeededRng& rng) {
  std::vector<double> x(d);
  for (auto& v : x) v = rng.uniform(0, 2 * kPi);
  return x;
}

WeightVector random_weights(std::size_t n, SeededRng& rng, bool positive = true) {
  std::vector<double> w(n);
  for (auto& v : w) v = positive ? 0.05 + rng.uniform() : (rng.uniform() < 0.3 ? 0.0 : rng.uniform());
  if (!positive) w[0] = 1.0;
  return WeightVector(w);
}

}  // namespace

TEST_CASE("real form conversion") {
  auto fs = line(2);
  auto c = TrigPolynomial::from_pairs(fs, std::vector<std::pair<Complex, Complex>>{{0, 0}, {0.5, 0.5}, {0, 0}});
  auto rc = to_real_form(c);
  CHECK(rc.c0 == 0.0);
  CHECK(rc.a[0] == Approx(1.0));
  CHECK(rc.b[0] == Approx(0.0));

  auto s = TrigPolynomial::from_pairs(
      fs, std::vector<std::pair<Complex, Complex>>{{0, 0}, {Complex(0, -0.5), Complex(0, 0.5)}, {0, 0}});
  auto rs = to_real_form(s);
  CHECK(rs.a[0] == Approx(0.0));
  CHECK(rs.b[0] == Approx(1.0));
  const double x = 0.7;
  CHECK(s(std::span<const double>(&x, 1)) == Approx(std::sin(x)));

  auto k = cosine_at(fs, 0, 3.0);
  auto rk = to_real_form(k);
  CHECK(rk.c0 == 3.0);
  CHECK(rk.a == std::vector<double>{0.0, 0.0});
  CHECK(rk.b == std::vector<double>{0.0, 0.0});

  CHECK_THROWS_AS(TrigPolynomial::from_pairs(fs, std::vector<std::pair<Complex, Complex>>{{0, 0}, {1, 0.5}, {0, 0}}),
                  Error);
  CHECK_THROWS_AS(TrigPolynomial(fs, std::vector<Complex>{Complex(1, 0.1), 0, 0}), Error);
}

TEST_CASE("property: real form round trip") {
  SeededRng rng(5);
  auto fs = lattice({{-2, -1, 0, 1, 2}, {-1, 0, 1}});
  for (int t = 0; t < 50; ++t) {
    auto f = random_poly(fs, rng);
    auto form = to_real_form(f);
    auto back = from_real_form(fs, form);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(back.coeff(i) - f.coeff(i)) <= 1e-12);
    auto x = random_point(2, rng);
    CHECK(std::abs(form(*fs, x) - f(x)) <= 1e-10);
  }
}

TEST_CASE("feature map examples") {
  auto fs = line(1);
  const double r = 1.0 / std::sqrt(2.0);
  const double x0 = 0.0, x1 = kPi / 2;
  auto p0 = feature_map_eval(std::span<const double>(&x0, 1), *fs, WeightVector({1, 1}));
  CHECK(p0[0] == Approx(r));
  CHECK(p0[1] == Approx(r));
  CHECK(p0[2] == Approx(0.0));
  auto p1 = feature_map_eval(std::span<const double>(&x1, 1), *fs, WeightVector({1, 1}));
  CHECK(p1[0] == Approx(r));
  CHECK(std::abs(p1[1]) < 1e-15);
  CHECK(p1[2] == Approx(r));
  auto p2 = feature_map_eval(std::span<const double>(&x0, 1), *fs, WeightVector({0, 1}));
  CHECK(p2 == std::vector<double>{0.0, 1.0, 0.0});
  CHECK_THROWS_AS(feature_map_eval(std::span<const double>(&x0, 1), *fs, WeightVector({1, 1, 1})), Error);
}

TEST_CASE("kernel examples") {
  auto fs = line(1);
  WeightVector w({1, 1});
  const double a = 0.3, b = a + kPi;
  CHECK(std::abs(kernel_eval(std::span<const double>(&a, 1), std::span<const double>(&b, 1), *fs, w)) < 1e-15);

  auto fs2 = lattice({{-1, 0, 1}, {-1, 0, 1}});
  auto w2 = WeightVector::uniform(fs2->half_size());
  std::vector<double> x{0.4, 1.9}, y{0.4 + 2 * kPi, 1.9 - 2 * kPi};
  CHECK(kernel_eval(x, y, *fs2, w2) == Approx(1.0).epsilon(1e-12));

  SeededRng rng(8);
  for (int t = 0; t < 100; ++t) {
    auto wr = random_weights(fs2->half_size(), rng, false);
    auto u = random_point(2, rng), v = random_point(2, rng);
    CHECK(kernel_eval(u, u, *fs2, wr) == Approx(1.0).epsilon(1e-12));
    auto pu = feature_map_eval(u, *fs2, wr), pv = feature_map_eval(v, *fs2, wr);
    double ip = 0.0;
    for (std::size_t k = 0; k < pu.size(); ++k) ip += pu[k] * pv[k];
    CHECK(std::abs(ip - kernel_eval(u, v, *fs2, wr)) <= 1e-10);
    // shift invariance
    std::vector<double> us{u[0] + 0.37, u[1] - 1.1}, vs{v[0] + 0.37, v[1] - 1.1};
    CHECK(std::abs(kernel_eval(us, vs, *fs2, wr) - kernel_eval(u, v, *fs2, wr)) <= 1e-10);
  }
}

TEST_CASE("distribution and weight conversions") {
  CHECK(distribution_of(WeightVector({1, 1, 1, 1})) == std::vector<double>{0.25, 0.25, 0.25, 0.25});
  CHECK(distribution_of(WeightVector({0, 1})) == std::vector<double>{0.0, 1.0});
  auto p = distribution_of(WeightVector({1, 2}));
  CHECK(p[0] == Approx(0.2));
  CHECK(p[1] == Approx(0.8));
  auto w = weights_of(p);
  CHECK(w.norm2() == Approx(1.0));
  auto p2 = distribution_of(w);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p2[i] - p[i]) <= 1e-15);
  CHECK_THROWS_AS(WeightVector({0, 0}), Error);
  CHECK_THROWS_AS(WeightVector({1, -1}), Error);
}

TEST_CASE("operator norm formula values") {
  auto fs = line(4);
  std::vector<double> u(5, 0.2);
  CHECK(integral_operator_norm(u, *fs) == Approx(0.1));
  std::vector<double> q{0.7, 0.1, 0.1, 0.05, 0.05};
  CHECK(integral_operator_norm(q, *fs) == Approx(0.35));
  auto f0 = lattice({{0}});
  std::vector<double> one{1.0};
  CHECK(integral_operator_norm(one, *f0) == Approx(0.5));
  auto nonint = lattice({{-0.5, 0, 0.5}});
  CHECK_THROWS_AS(integral_operator_norm(std::vector<double>{0.5, 0.5}, *nonint), Error);
}

TEST_CASE("property: quadrature operator spectrum matches the exact spectral radius") {
  SeededRng rng(77);
  for (int t = 0; t < 8; ++t) {
    const bool two_d = t % 2 == 1;
    auto fs = two_d ? lattice({{-1, 0, 1}, {-1, 0, 1}}) : line(1 + static_cast<int>(rng.below(4)));
    const std::size_t m = two_d ? 16 : 64;
    std::vector<double> raw(fs->half_size());
    for (auto& v : raw) v = rng.uniform();
    auto w = WeightVector(raw);
    auto p = distribution_of(w);

    const std::size_t d = fs->dim();
    const std::size_t N = d == 1 ? m : m * m;
    std::vector<std::vector<double>> pts(N, std::vector<double>(d));
    for (std::size_t a = 0; a < N; ++a) {
      pts[a][0] = 2 * kPi * static_cast<double>(a % m) / m;
      if (d == 2) pts[a][1] = 2 * kPi * static_cast<double>(a / m) / m;
    }
    Eigen::MatrixXd K(N, N);
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b) K(a, b) = kernel_eval(pts[a], pts[b], *fs, w) / static_cast<double>(N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(std::abs(top - integral_operator_spectral_radius(p, *fs)) <= 1e-4);
  }
}

TEST_CASE("RKHS norm examples on a five-frequency lattice") {
  auto fs = line(4);
  REQUIRE(fs->half_size() == 5);
  auto f1 = cosine_at(fs, 1);
  CHECK(std::abs(rkhs_norm(f1, WeightVector::uniform(5)) - std::sqrt(5.0)) <= 1e-10);
  CHECK(std::abs(rkhs_norm(f1, WeightVector({0, 1, 0, 0, 0})) - 1.0) <= 1e-10);
  std::vector<Complex> c(5, Complex(0.1, 0));
  c[0] = 0.2;
  TrigPolynomial f3(fs, c);
  CHECK(std::abs(rkhs_norm(f3, WeightVector::uniform(5)) - 1.0) <= 1e-10);

  CHECK_THROWS_AS(rkhs_norm(cosine_at(fs, 2), WeightVector({0, 1, 0, 0, 0})), Error);
  auto nonint = lattice({{-0.5, 0, 0.5}});
  CHECK_THROWS_AS(rkhs_norm(cosine_at(nonint, 1), WeightVector({1, 1})), Error);
}

TEST_CASE("property: RKHS norm equals the projected hyperplane norm") {
  SeededRng rng(19);
  auto fs = lattice({{-2, -1, 0, 1, 2}, {-1, 0, 1}});
  const auto& half = fs->half();
  for (int t = 0; t < 10; ++t) {
    auto f = random_poly(fs, rng);
    auto w = random_weights(fs->half_size(), rng);
    double sq = 0.0;
    auto project = [&](auto basis) { return oracle::torus_mean(2, 8, [&](const oracle::Vec& x) { return f(x) * basis(x); }); };
    const double c0 = project([](const oracle::Vec&) { return 1.0; });
    sq += std::pow(c0 * w.norm2() / w[0], 2);
    for (std::size_t i = 1; i < half.size(); ++i) {
      auto ph = [&](const oracle::Vec& x) { return half[i][0] * x[0] + half[i][1] * x[1]; };
      const double a = 2 * project([&](const oracle::Vec& x) { return std::cos(ph(x)); });
      const double b = 2 * project([&](const oracle::Vec& x) { return std::sin(ph(x)); });
      sq += (a * a + b * b) * std::pow(w.norm2() / w[i], 2);
    }
    CHECK(std::abs(rkhs_norm(f, w) - std::sqrt(sq)) <= 1e-10 * std::max(1.0, std::sqrt(sq)));
  }
}

TEST_CASE("property: re-weighting preserves the function class") {
  SeededRng rng(23);
  auto fs = lattice({{-2, -1, 0, 1, 2}, {-2, -1, 0, 1, 2}});
  const std::size_t n = fs->half_size();
  auto w = random_weights(n, rng);
  auto flat = WeightVector::uniform(n);
  std::vector<double> v(2 * n - 1), vp(v.size());
  for (auto& x : v) x = rng.uniform(-1, 1);
  auto weight_of = [](std::size_t k) { return k == 0 ? std::size_t{0} : (k + 1) / 2; };
  for (std::size_t k = 0; k < v.size(); ++k) vp[k] = v[k] * w[weight_of(k)] / w.norm2() * flat.norm2();
  for (int t = 0; t < 100; ++t) {
    auto x = random_point(2, rng);
    auto pw = feature_map_eval(x, *fs, w), pu = feature_map_eval(x, *fs, flat);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      lhs += v[k] * pw[k];
      rhs += vp[k] * pu[k];
    }
    CHECK(std::abs(lhs - rhs) <= 1e-10);
  }
}

TEST_CASE("property: Gram matrices are positive semidefinite") {
  SeededRng rng(31);
  auto fs = lattice({{-3, -2, -1, 0, 1, 2, 3}, {-1, 0, 1}});
  for (int t = 0; t < 20; ++t) {
    const std::size_t m = 1 + rng.below(50);
    auto w = random_weights(fs->half_size(), rng, false);
    std::vector<std::vector<double>> pts;
    for (std::size_t a = 0; a < m; ++a) pts.push_back(random_point(2, rng));
    Eigen::MatrixXd G(m, m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) G(a, b) = kernel_eval(pts[a], pts[b], *fs, w);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("L2 norm") {
  auto fs = line(1);
  CHECK(l2_norm_sq(cosine_at(fs, 1)) == Approx(kPi));
  auto fs2 = lattice({{-1, 0, 1}, {-1, 0, 1}});
  CHECK(l2_norm_sq(cosine_at(fs2, 0)) == Approx(4 * kPi * kPi));
  CHECK(l2_norm_sq(TrigPolynomial::zero(fs2)) == 0.0);

  SeededRng rng(41);
  for (auto ls : {lattice({{-2, -1, 0, 1, 2}}), fs2, lattice({{-1, 0, 1}, {-2, -1, 0, 1, 2}, {-1, 0, 1}})}) {
    auto f = random_poly(ls, rng);
    const std::size_t d = ls->dim();
    const double quad = std::pow(2 * kPi, d) * oracle::torus_mean(d, 9, [&](const oracle::Vec& x) { return f(x) * f(x); });
    CHECK(std::abs(l2_norm_sq(f) - quad) <= 1e-8 * quad);
  }
}

TEST_CASE("integral operator action") {
  auto fs = line(2);
  std::vector<double> p{0.2, 0.5, 0.3};
  auto g = apply_integral_operator(cosine_at(fs, 1), *fs, p);
  CHECK(g.coeff(1).real() == Approx(0.5 / 2 / 2));
  CHECK(g.coeff(2) == Complex{});
  auto s = TrigPolynomial(fs, {0, Complex(0, -0.5), 0});
  auto gs = apply_integral_operator(s, *fs, p);
  CHECK(gs.coeff(1).imag() == Approx(-0.5 * 0.25));

  auto small = line(1);
  auto big = line(3);
  auto off = apply_integral_operator(cosine_at(big, 3), *small, std::vector<double>{0.5, 0.5});
  CHECK(off.support().empty());
}

TEST_CASE("property: integral operator matches quadrature") {
  SeededRng rng(53);
  for (auto fs : {line(3), lattice({{-1, 0, 1}, {-2, -1, 0, 1, 2}})}) {
    const std::size_t d = fs->dim();
    auto w = random_weights(fs->half_size(), rng);
    auto p = distribution_of(w);
    auto f = random_poly(fs, rng);
    auto Tf = apply_integral_operator(f, *fs, p);
    for (int t = 0; t < 5; ++t) {
      auto x = random_point(d, rng);
      const double quad =
          oracle::torus_mean(d, 12, [&](const oracle::Vec& xp) { return kernel_eval(x, xp, *fs, w) * f(xp); });
      CHECK(std::abs(Tf(x) - quad) <= 1e-6);
    }
  }
}
