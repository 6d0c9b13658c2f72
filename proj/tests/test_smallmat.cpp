#include <catch_amalgamated.hpp>

#include <quadham/models.hpp>
#include <quadham/smallmat.hpp>

#include <cmath>
#include <random>

using namespace quadham;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }
cplx random_c(double r = 1.0) { return {uniform(-r, r), uniform(-r, r)}; }

CMatrix random_matrix(int n, double r = 1.0) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = random_c(r);
  return m;
}

double poly_residual(const std::array<cplx, 3>& roots, cplx c2, cplx c1, cplx c0) {
  double worst = 0.0;
  for (const auto s : roots) worst = std::max(worst, std::abs(((s + c2) * s + c1) * s + c0));
  return worst;
}

double coefficient_scale(cplx c2, cplx c1, cplx c0) { return std::max({1.0, std::abs(c2), std::abs(c1), std::abs(c0)}); }

bool lexicographic(const std::array<cplx, 3>& r) {
  for (int i = 0; i + 1 < 3; ++i) {
    const auto a = r[i], b = r[i + 1];
    if (a.real() > b.real() + 1e-12) return false;
    if (std::abs(a.real() - b.real()) <= 1e-12 && a.imag() > b.imag() + 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("cubic_roots of the zero polynomial", "[smallmat]") {
  const auto r = cubic_roots(0.0, 0.0, 0.0);
  for (const auto s : r) CHECK(std::abs(s) == 0.0);
}

TEST_CASE("cubic_roots of an antisymmetric coupling matrix", "[smallmat]") {
  const double g1 = 0.7, g2 = -1.3, g3 = 0.4;
  const auto c = characteristic_coefficients(su3_coupling_matrix(g1, g2, g3));
  const auto r = cubic_roots(c[0], c[1], c[2]);
  const double w = std::sqrt(g1 * g1 + g2 * g2 + g3 * g3);
  CHECK(std::abs(r[0] - cplx(0, -w)) < 1e-12);
  CHECK(std::abs(r[1]) < 1e-12);
  CHECK(std::abs(r[2] - cplx(0, w)) < 1e-12);
}

TEST_CASE("cubic_roots recovers planted roots", "[smallmat][property]") {
  for (int trial = 0; trial < 200; ++trial) {
    std::array<cplx, 3> planted{random_c(3.0), random_c(3.0), random_c(3.0)};
    const cplx c2 = -(planted[0] + planted[1] + planted[2]);
    const cplx c1 = planted[0] * planted[1] + planted[1] * planted[2] + planted[0] * planted[2];
    const cplx c0 = -planted[0] * planted[1] * planted[2];
    const auto r = cubic_roots(c2, c1, c0);
    CHECK(poly_residual(r, c2, c1, c0) <= 1e-10 * coefficient_scale(c2, c1, c0));
    CHECK(lexicographic(r));
    for (const auto p : planted) {
      double best = 1e300;
      for (const auto s : r) best = std::min(best, std::abs(s - p));
      if (min_gap({planted.begin(), planted.end()}) > 1e-3) CHECK(best < 1e-10 * coefficient_scale(c2, c1, c0));
    }
  }
}

TEST_CASE("cubic_roots handles repeated and real roots", "[smallmat]") {
  // (s - 1)^2 (s + 2) = s^3 - 3 s + 2
  const auto r = cubic_roots(0.0, -3.0, 2.0);
  CHECK(poly_residual(r, 0.0, -3.0, 2.0) < 1e-10);
  CHECK(std::abs(r[0] - cplx(-2.0)) < 1e-10);
  // triple root s = 1
  const auto t = cubic_roots(-3.0, 3.0, -1.0);
  CHECK(poly_residual(t, -3.0, 3.0, -1.0) < 1e-10);
}

TEST_CASE("quadratic_roots", "[smallmat]") {
  const auto r = quadratic_roots(-3.0, 2.0);
  CHECK(std::abs(r[0] - 1.0) < 1e-15);
  CHECK(std::abs(r[1] - 2.0) < 1e-15);
  const auto z = quadratic_roots(0.0, 0.0);
  CHECK(std::abs(z[0]) == 0.0);
  // cancellation-prone pair
  const auto c = quadratic_roots(-1e8, 1.0);
  CHECK(std::abs(c[0] - 1e-8) < 1e-20);
}

TEST_CASE("eig of a diagonal matrix", "[smallmat]") {
  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << 1.0, 2.0, 3.0;
  const auto es = eig(d);
  REQUIRE(es.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(es.eigenvalues[i] - cplx(i + 1.0)) < 1e-14);
    CVector e = CVector::Zero(3);
    e(i) = 1.0;
    CHECK((es.right[i] - e).norm() < 1e-14);
    CHECK((es.left[i] - e).norm() < 1e-14);
  }
}

namespace {

void check_eigensystem(const CMatrix& m) {
  const auto es = eig(m);
  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = 0; j < es.size(); ++j) {
      const cplx p = es.left[i].cwiseProduct(es.right[j]).sum();
      CHECK(std::abs(p - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
  CHECK((es.reconstruct() - m).norm() <= 1e-10 * m.norm());
}

}  // namespace

TEST_CASE("eig of the one-coupling antisymmetric matrix", "[smallmat]") {
  const CMatrix m = su3_coupling_matrix(1.0, 0.0, 0.0);
  const auto es = eig(m);
  CHECK(std::abs(es.eigenvalues[0] - cplx(0, -1)) < 1e-14);
  CHECK(std::abs(es.eigenvalues[1]) < 1e-14);
  CHECK(std::abs(es.eigenvalues[2] - cplx(0, 1)) < 1e-14);
  check_eigensystem(m);
}

TEST_CASE("three-mode scattering matrix with equal couplings is nilpotent", "[smallmat]") {
  // the opposite metric sign of the Stokes slot cancels the two couplings in the spectrum
  const CMatrix h = reduce(ModelSpec::raman(1.0, 1.0, 0.0, 0.0)).rate_matrix() * I_unit;
  for (const auto l : eigenvalues(h)) CHECK(std::abs(l) < 1e-12);
  CHECK((h * h * h).norm() < 1e-15);
  CHECK_THROWS_AS(eig(h), degeneracy_error);
  // expm falls back and stays exact: e^{-iht} = 1 - iht - h^2 t^2 / 2
  const double t = 0.8;
  const CMatrix expected = CMatrix::Identity(3, 3) - I_unit * t * h - 0.5 * t * t * h * h;
  CHECK((expm(h, -I_unit * t) - expected).norm() < 1e-14);
}

TEST_CASE("eig of the three-mode scattering matrix", "[smallmat]") {
  const CMatrix h = reduce(ModelSpec::raman(1.0, 2.0, 0.0, 0.0)).rate_matrix() * I_unit;
  const auto ev = eigenvalues(h);
  // eigenvalues 0 and +-sqrt(g_a^2 - g_s^2)
  CHECK(std::abs(ev[0] + std::sqrt(3.0)) < 1e-14);
  CHECK(std::abs(ev[1]) < 1e-14);
  CHECK(std::abs(ev[2] - std::sqrt(3.0)) < 1e-14);
  check_eigensystem(h);
  check_eigensystem(reduce(ModelSpec::raman(1.0, 1.0, 2.0, 1.0)).rate_matrix() * I_unit);
}

TEST_CASE("eig reconstruction on random matrices", "[smallmat][property]") {
  for (int trial = 0; trial < 100; ++trial) {
    check_eigensystem(random_matrix(3, 2.0));
    check_eigensystem(random_matrix(2, 2.0));
  }
}

TEST_CASE("eig refuses degenerate spectra", "[smallmat]") {
  CHECK_THROWS_AS(eig(CMatrix::Identity(3, 3)), degeneracy_error);
  CMatrix jordan(2, 2);
  jordan << 1, 1, 0, 1;
  CHECK_THROWS_AS(eig(jordan), degeneracy_error);
  CHECK_THROWS_AS(eig(CMatrix::Zero(3, 3)), degeneracy_error);
  CHECK_THROWS_AS(eig(CMatrix::Zero(4, 4)), structure_error);
}

TEST_CASE("expm of zero is the identity", "[smallmat]") {
  for (const auto method : {ExpmMethod::Auto, ExpmMethod::Taylor}) CHECK((expm(CMatrix::Zero(3, 3), 1.0, method) - CMatrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("expm of the antisymmetric coupling matrix in closed form", "[smallmat]") {
  const double g1 = 0.8, g2 = 0.5, g3 = -0.3, t = 1.7;
  const double sigma = g1 * g1 + g2 * g2 + g3 * g3;
  const CMatrix u = expm(su3_coupling_matrix(g1, g2, g3), t);
  const double expected = g2 * g2 / sigma + (g1 * g1 + g3 * g3) / sigma * std::cos(std::sqrt(sigma) * t);
  CHECK(std::abs(u(0, 0) - expected) < 1e-13);
  CHECK(std::abs(expm_spectral(su3_coupling_matrix(g1, g2, g3), t)(0, 0) - expected) < 1e-13);
}

TEST_CASE("expm eigen and Taylor paths agree", "[smallmat][property]") {
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix m = random_matrix(3);
    const cplx s = random_c(1.5);
    const CMatrix a = expm(m, s, ExpmMethod::Eigen);
    const CMatrix b = expm(m, s, ExpmMethod::Taylor);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("expm(M) expm(-M) is the identity", "[smallmat][property]") {
  for (int trial = 0; trial < 100; ++trial) {
    CMatrix m = random_matrix(3);
    m *= uniform(0.1, 10.0) / m.norm();
    const CMatrix p = expm(m) * expm(m, -1.0);
    CHECK((p - CMatrix::Identity(3, 3)).norm() < 1e-10);
  }
}

TEST_CASE("expm of antisymmetric real matrices is orthogonal", "[smallmat][property]") {
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix u = expm(su3_coupling_matrix(uniform(-2, 2), uniform(-2, 2), uniform(-2, 2)), uniform(0, 5));
    CHECK(u.imag().norm() < 1e-12);
    CHECK((u.transpose() * u - CMatrix::Identity(3, 3)).norm() < 1e-10);
  }
}

TEST_CASE("expm falls back on degenerate input", "[smallmat]") {
  CMatrix jordan(2, 2);
  jordan << 1, 1, 0, 1;
  const CMatrix u = expm(jordan, 1.0);
  CMatrix expected(2, 2);
  expected << std::exp(1.0), std::exp(1.0), 0, std::exp(1.0);
  CHECK((u - expected).norm() < 1e-13);
}

TEST_CASE("spectral weights at roots 0, i, -i", "[smallmat]") {
  const auto w = spectral_weights({cplx(0), cplx(0, 1), cplx(0, -1)});
  for (const auto r : w.residuals()) CHECK(std::abs(r) < 1e-12);
  CHECK(std::abs(w.H - 1.0) < 1e-15);
}

TEST_CASE("spectral weights on planted distinct real roots", "[smallmat][property]") {
  for (int trial = 0; trial < 100; ++trial) {
    std::array<cplx, 3> s{uniform(-3, -1), uniform(-0.5, 0.5), uniform(1, 3)};
    for (const auto r : spectral_weights(s).residuals()) CHECK(std::abs(r) < 1e-12);
  }
}

TEST_CASE("spectral weights are symmetric under root permutation", "[smallmat][property]") {
  std::array<cplx, 3> s{random_c(2), random_c(2), random_c(2)};
  const auto a = spectral_weights(s);
  std::array<int, 3> p{0, 1, 2};
  do {
    const auto b = spectral_weights({s[p[0]], s[p[1]], s[p[2]]});
    CHECK(std::abs(a.F - b.F) < 1e-13);
    CHECK(std::abs(a.G - b.G) < 1e-13);
    CHECK(std::abs(a.H - b.H) < 1e-13);
  } while (std::next_permutation(p.begin(), p.end()));
}

TEST_CASE("spectral weights reject degenerate roots", "[smallmat]") {
  CHECK_THROWS_AS(spectral_weights({cplx(1), cplx(1), cplx(2)}), degeneracy_error);
}

TEST_CASE("spectral and eigenvector routes agree on random couplings", "[smallmat][property]") {
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix m = su3_coupling_matrix(uniform(-2, 2), uniform(-2, 2), uniform(-2, 2));
    const double t = uniform(0.1, 3.0);
    CHECK((expm_spectral(m, t) - eig(m).exp(t)).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("spectral route matches expm for scaled roots", "[smallmat]") {
  const CMatrix m = random_matrix(3);
  for (const double t : {0.3, 1.0, 2.5}) CHECK((expm_spectral(m, t) - expm(m, t, ExpmMethod::Taylor)).cwiseAbs().maxCoeff() < 1e-11);
}
