#ifndef QUADHAM_SMALLMAT_HPP
#define QUADHAM_SMALLMAT_HPP

// Dense kernels for 2x2 and 3x3 complex matrices: characteristic roots, biorthogonal
// left/right eigensystems from cofactors, matrix exponentials, and the quadratic
// spectral weights (F, G, H) with e^M = H + G M + F M^2 for 3x3 M.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace quadham {

inline constexpr double kDegeneracyThreshold = 1e-9;

namespace detail {

// Lexicographic by (Re, Im); real parts within `tol` count as equal.
inline void canonical_order(std::vector<cplx>& z, double tol) {
  std::sort(z.begin(), z.end(), [tol](const cplx& a, const cplx& b) {
    if (std::abs(a.real() - b.real()) > tol) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

inline double coefficient_scale(std::initializer_list<cplx> cs) {
  double m = 1.0;
  for (const auto& c : cs) m = std::max(m, std::abs(c));
  return m;
}

inline cplx principal_cbrt(cplx z) {
  if (z == cplx{}) return {};
  return std::polar(std::cbrt(std::abs(z)), std::arg(z) / 3.0);
}

}  // namespace detail

// Roots of s^2 + c1 s + c0, canonically ordered.
inline std::array<cplx, 2> quadratic_roots(cplx c1, cplx c0) {
  const cplx disc = std::sqrt(c1 * c1 - 4.0 * c0);
  // avoid cancellation: q = -(c1 + sign * disc) / 2
  const cplx q = (std::real(std::conj(c1) * disc) >= 0.0) ? -0.5 * (c1 + disc) : -0.5 * (c1 - disc);
  std::vector<cplx> r;
  if (q == cplx{}) {
    r = {cplx{}, cplx{}};
  } else {
    r = {q, c0 / q};
  }
  detail::canonical_order(r, 1e-12 * detail::coefficient_scale({c1, c0}));
  return {r[0], r[1]};
}

// Roots of s^3 + c2 s^2 + c1 s + c0 by Cardano's formula on the depressed cubic,
// one Newton step per root, canonically ordered by (Re, Im).
inline std::array<cplx, 3> cubic_roots(cplx c2, cplx c1, cplx c0) {
  const cplx shift = c2 / 3.0;
  const cplx p = c1 - c2 * c2 / 3.0;
  const cplx q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  const cplx sq = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  const cplx u3a = -q / 2.0 + sq;
  const cplx u3b = -q / 2.0 - sq;
  const cplx u3 = std::abs(u3a) >= std::abs(u3b) ? u3a : u3b;
  const cplx u = detail::principal_cbrt(u3);
  const cplx v = (u == cplx{}) ? cplx{} : -p / (3.0 * u);
  const cplx w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);

  auto poly = [&](cplx s) { return ((s + c2) * s + c1) * s + c0; };
  auto dpoly = [&](cplx s) { return (3.0 * s + 2.0 * c2) * s + c1; };

  std::vector<cplx> roots(3);
  cplx wk = 1.0;
  for (int k = 0; k < 3; ++k) {
    cplx s = wk * u + std::conj(wk) * v - shift;
    const cplx d = dpoly(s);
    if (std::abs(d) > 0.0) {
      const cplx polished = s - poly(s) / d;
      if (std::abs(poly(polished)) <= std::abs(poly(s))) s = polished;
    }
    roots[static_cast<std::size_t>(k)] = s;
    wk *= w;
  }
  detail::canonical_order(roots, 1e-12 * detail::coefficient_scale({c2, c1, c0}));
  return {roots[0], roots[1], roots[2]};
}

// Monic characteristic polynomial det(sI - M) of a 2x2 or 3x3 matrix: coefficients
// from highest-but-one power down to the constant.
inline std::vector<cplx> characteristic_coefficients(const CMatrix& m) {
  if (m.rows() != m.cols()) throw structure_error("characteristic_coefficients: matrix not square");
  if (m.rows() == 2) return {-m.trace(), m.determinant()};
  if (m.rows() == 3) {
    const cplx minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                        m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    return {-m.trace(), minors, -m.determinant()};
  }
  throw structure_error("characteristic_coefficients: only 2x2 and 3x3 supported");
}

inline std::vector<cplx> eigenvalues(const CMatrix& m) {
  const auto c = characteristic_coefficients(m);
  if (c.size() == 2) {
    const auto r = quadratic_roots(c[0], c[1]);
    return {r.begin(), r.end()};
  }
  const auto r = cubic_roots(c[0], c[1], c[2]);
  return {r.begin(), r.end()};
}

inline double min_gap(const std::vector<cplx>& z) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) g = std::min(g, std::abs(z[i] - z[j]));
  return g;
}

// Biorthogonal eigensystem: left[i] . right[j] = delta_ij (bilinear, no conjugation),
// M = sum_i eigenvalues[i] * right[i] * left[i]^T.
struct Eigensystem {
  std::vector<cplx> eigenvalues;
  std::vector<CVector> right;
  std::vector<CVector> left;
  std::vector<cplx> normalizers;  // N_i, both cofactor vectors were divided by it

  std::size_t size() const { return eigenvalues.size(); }

  template <typename Fn>
  CMatrix apply(Fn&& f) const {
    const auto n = static_cast<Eigen::Index>(size());
    CMatrix out = CMatrix::Zero(n, n);
    for (std::size_t i = 0; i < size(); ++i) out += f(eigenvalues[i]) * (right[i] * left[i].transpose());
    return out;
  }

  CMatrix reconstruct() const {
    return apply([](cplx l) { return l; });
  }
  CMatrix exp(cplx scale = 1.0) const {
    return apply([scale](cplx l) { return std::exp(scale * l); });
  }
};

namespace detail {

inline CMatrix adjugate(const CMatrix& a) {
  if (a.rows() == 2) {
    CMatrix r(2, 2);
    r << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
    return r;
  }
  CMatrix r(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      // cofactor of (i, j) placed at (j, i)
      r(j, i) = a(i1, j1) * a(i2, j2) - a(i1, j2) * a(i2, j1);
    }
  return r;
}

}  // namespace detail

// Eigensystem by the cofactor construction: for each root, the adjugate of (M - lambda I)
// has rank one; its columns are right eigenvectors (cofactors of a row) and its rows are
// left eigenvectors (cofactors of a column). The row/column with the largest cofactor is used.
inline Eigensystem eig(const CMatrix& m, double rel_threshold = kDegeneracyThreshold) {
  if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 3))
    throw structure_error("eig: only 2x2 and 3x3 matrices are supported");
  const double scale = m.norm();
  Eigensystem es;
  es.eigenvalues = eigenvalues(m);
  if (scale == 0.0 || min_gap(es.eigenvalues) <= rel_threshold * scale)
    throw degeneracy_error("eig: eigenvalues not separated beyond " + std::to_string(rel_threshold) + " * |M|");

  const auto n = m.rows();
  for (const cplx lambda : es.eigenvalues) {
    const CMatrix adj = detail::adjugate(m - lambda * CMatrix::Identity(n, n));
    Eigen::Index r = 0, c = 0;
    adj.cwiseAbs().maxCoeff(&r, &c);
    CVector right = adj.col(c);
    CVector left = adj.row(r).transpose();
    const cplx pairing = left.cwiseProduct(right).sum();  // bilinear l . r
    if (std::abs(pairing) <= std::numeric_limits<double>::epsilon() * right.norm() * left.norm())
      throw degeneracy_error("eig: left/right eigenvectors nearly orthogonal");
    cplx norm = std::sqrt(pairing);
    // sign convention: the largest entry of the right vector has positive real part
    Eigen::Index big = 0;
    (right / norm).cwiseAbs().maxCoeff(&big);
    const cplx lead = right(big) / norm;
    if (lead.real() < 0.0 || (lead.real() == 0.0 && lead.imag() < 0.0)) norm = -norm;
    es.right.push_back(right / norm);
    es.left.push_back(left / norm);
    es.normalizers.push_back(norm);
  }
  return es;
}

// e^{scale * M} by scaling and squaring with a Taylor kernel.
inline CMatrix expm_taylor(const CMatrix& m, cplx scale = 1.0) {
  const CMatrix a = scale * m;
  const auto n = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.25)));
  const CMatrix b = a / std::ldexp(1.0, squarings);
  CMatrix sum = CMatrix::Identity(n, n);
  CMatrix term = CMatrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
    if (term.norm() <= 1e-18 * sum.norm()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

enum class ExpmMethod { Auto, Eigen, Taylor };

// e^{scale * M}. Auto uses the eigensystem when the spectrum is well separated and the
// eigensystem reconstructs M to 1e-12, otherwise scaling and squaring.
inline CMatrix expm(const CMatrix& m, cplx scale = 1.0, ExpmMethod method = ExpmMethod::Auto) {
  if (m.rows() != m.cols()) throw structure_error("expm: matrix not square");
  if (method == ExpmMethod::Taylor) return expm_taylor(m, scale);
  const bool small = m.rows() == 2 || m.rows() == 3;
  if (method == ExpmMethod::Eigen) {
    if (!small) throw structure_error("expm: eigen path only for 2x2 and 3x3");
    return eig(m).exp(scale);
  }
  if (small && m.norm() > 0.0) {
    try {
      const Eigensystem es = eig(m);
      if ((es.reconstruct() - m).norm() <= 1e-12 * m.norm()) return es.exp(scale);
    } catch (const degeneracy_error&) {
    }
  }
  return expm_taylor(m, scale);
}

struct SpectralWeights {
  cplx F, G, H;
  std::array<cplx, 3> roots;

  // H - G s + F s^2 - e^{-s} at each root; zero up to rounding.
  std::array<cplx, 3> residuals() const {
    std::array<cplx, 3> r;
    for (std::size_t i = 0; i < 3; ++i) {
      const cplx s = roots[i];
      r[i] = H - G * s + F * s * s - std::exp(-s);
    }
    return r;
  }
};

// Weights of the quadratic p(s) = H - G s + F s^2 interpolating e^{-s} at three distinct
// roots (divided differences). For roots summing to zero G reduces to
// sum_i (-s_i) e^{-s_i} / prod_{j!=i}(s_i - s_j).
inline SpectralWeights spectral_weights(const std::array<cplx, 3>& s, double rel_threshold = kDegeneracyThreshold) {
  const double scale = std::max({std::abs(s[0]), std::abs(s[1]), std::abs(s[2])});
  if (scale == 0.0 || min_gap({s.begin(), s.end()}) <= rel_threshold * scale)
    throw degeneracy_error("spectral_weights: roots not separated");
  SpectralWeights w{0.0, 0.0, 0.0, s};
  for (std::size_t i = 0; i < 3; ++i) {
    const cplx sj = s[(i + 1) % 3], sk = s[(i + 2) % 3];
    const cplx e = std::exp(-s[i]) / ((s[i] - sj) * (s[i] - sk));
    w.F += e;
    w.G += (sj + sk) * e;
    w.H += sj * sk * e;
  }
  return w;
}

// e^{scale * M} for 3x3 M from the spectral weights: with s_i the roots of
// det(scale*M + s I) = 0, e^{scale M} = H + G (scale M) + F (scale M)^2.
inline CMatrix expm_spectral(const CMatrix& m, cplx scale = 1.0) {
  if (m.rows() != 3 || m.cols() != 3) throw structure_error("expm_spectral: 3x3 only");
  const CMatrix a = scale * m;
  const auto lambda = eigenvalues(a);
  const auto w = spectral_weights({-lambda[0], -lambda[1], -lambda[2]});
  return w.H * CMatrix::Identity(3, 3) + w.G * a + w.F * a * a;
}

}  // namespace quadham

#endif  // QUADHAM_SMALLMAT_HPP
