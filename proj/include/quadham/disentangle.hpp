#ifndef QUADHAM_DISENTANGLE_HPP
#define QUADHAM_DISENTANGLE_HPP

// Factorization of exp(sum_g c_g G_g) into an ordered product of single-generator
// exponentials. Coefficients come from exact entry matching of the triangular and
// diagonal factors against the direct exponential of the representation matrix; the
// matrix identity is the contract.
//
// Factor orders:
//   SU2 / SU11  (J+, J3, J-) / (K+, K3, K-)                 upper * diag * lower
//   SU21        (D, G, A, C, K, F, B, J, E), C pinned to 0  upper * diag * lower
//   SU3         (E, J, B, C, C+2K-3F, A, G, D)              lower * diag * upper

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "errors.hpp"
#include "models.hpp"
#include "smallmat.hpp"
#include "types.hpp"

namespace quadham {

struct Factor {
  std::string generator;
  cplx coeff;
};

struct FactoredForm {
  GroupId group;
  std::vector<Factor> factors;

  cplx coefficient(const std::string& name) const {
    for (const auto& f : factors)
      if (f.generator == name) return f.coeff;
    throw lookup_error("factor '" + name + "' not present");
  }

  // prod_i exp(c_i M_i) in the group's representation.
  CMatrix product() const {
    const GeneratorSet set = generators(group);
    const auto d = static_cast<Eigen::Index>(set.dim());
    CMatrix out = CMatrix::Identity(d, d);
    for (const auto& f : factors) {
      const RationalMatrix& rm = set.matrix(f.generator);
      const CMatrix m = rm.to_complex();
      CMatrix e;
      if (rm.is_diagonal()) {
        e = CMatrix::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) e(i, i) = std::exp(f.coeff * m(i, i));
      } else if ((rm * rm).is_zero()) {
        e = CMatrix::Identity(d, d) + f.coeff * m;
      } else {
        e = expm(m, f.coeff);
      }
      out = out * e;
    }
    return out;
  }
};

// Diagonal-factor coefficients are defined modulo this period in every representation
// used here (generator eigenvalues are half-integers on the Fock space).
inline const cplx kDiagonalBranchPeriod{0.0, 4.0 * std::numbers::pi};

// Relative Frobenius distance between the factor product and the direct exponential.
inline double verify_factorization(const FactoredForm& factored, const CMatrix& direct) {
  const CMatrix p = factored.product();
  if (p.rows() != direct.rows() || p.cols() != direct.cols())
    throw structure_error("verify_factorization: dimension mismatch");
  const double n = direct.norm();
  const double diff = (p - direct).norm();
  return n > 0.0 ? diff / n : diff;
}

namespace detail {

inline void require_pivot(cplx pivot, const CMatrix& u, const char* what, double t) {
  if (!(std::abs(pivot) > 1e-14 * u.norm()))
    throw singularity_error(std::string("factorization pivot ") + what + " vanishes", t);
}

inline void check_square(const CMatrix& u, Eigen::Index n, const char* who) {
  if (u.rows() != n || u.cols() != n) throw structure_error(std::string(who) + ": wrong matrix dimension");
}

inline const char* raising_name(GroupId g) { return g == GroupId::SU2 ? "J+" : "K+"; }
inline const char* diagonal_name(GroupId g) { return g == GroupId::SU2 ? "J3" : "K3"; }
inline const char* lowering_name(GroupId g) { return g == GroupId::SU2 ? "J-" : "K-"; }

inline void require_rank1(GroupId g) {
  if (g != GroupId::SU2 && g != GroupId::SU11) throw structure_error("rank-1 disentangling needs SU2 or SU11");
}

// sinh(f)/f as an even function of f, given f^2.
inline cplx sinhc_from_square(cplx f2) {
  if (std::abs(f2) < 1e-8) return 1.0 + f2 / 6.0 + f2 * f2 / 120.0;
  const cplx f = std::sqrt(f2);
  return std::sinh(f) / f;
}

}  // namespace detail

// Entry matching of a 2x2 group element U = exp(x+ R) exp(c D) exp(x- L).
inline FactoredForm factor_rank1(GroupId group, const CMatrix& u, double t = 0.0) {
  detail::require_rank1(group);
  detail::check_square(u, 2, "factor_rank1");
  const GeneratorSet set = generators(group);
  detail::require_pivot(u(1, 1), u, "U22", t);
  const double r01 = set.matrix(detail::raising_name(group))(0, 1).to_double();
  const double l10 = set.matrix(detail::lowering_name(group))(1, 0).to_double();
  return {group,
          {{detail::raising_name(group), u(0, 1) / (u(1, 1) * r01)},
           {detail::diagonal_name(group), -2.0 * std::log(u(1, 1))},
           {detail::lowering_name(group), u(1, 0) / (u(1, 1) * l10)}}};
}

// The representation matrix W3 * X3 + W+ * X+ + W- * X- of the exponent.
inline CMatrix rank1_exponent(GroupId group, cplx w3, cplx wplus, cplx wminus) {
  detail::require_rank1(group);
  const GeneratorSet set = generators(group);
  return assemble({{detail::diagonal_name(group), w3}, {detail::raising_name(group), wplus},
                   {detail::lowering_name(group), wminus}},
                  set);
}

// exp(W3 X3 + W+ X+ + W- X-) in closed form, U = cosh f + (sinh f / f) X with f^2 = -det X.
inline CMatrix rank1_group_element(GroupId group, cplx w3, cplx wplus, cplx wminus) {
  const CMatrix x = rank1_exponent(group, w3, wplus, wminus);
  const cplx f2 = x(0, 0) * x(0, 0) + x(0, 1) * x(1, 0);
  return std::cosh(std::sqrt(f2)) * CMatrix::Identity(2, 2) + detail::sinhc_from_square(f2) * x;
}

// Disentangles exp(W3 X3 + W+ X+ + W- X-) for su(2) or su(1,1) by matching U's entries.
inline FactoredForm disentangle_rank1(GroupId group, cplx w3, cplx wplus, cplx wminus, double t = 0.0) {
  return factor_rank1(group, rank1_group_element(group, w3, wplus, wminus), t);
}

// The rank-1 coefficients exactly as printed in the literature formulas
//   X+- = W+- sinh f / (2 f cosh f - W3 sinh f),  X3 = [cosh f - (W3 / 2f) sinh f]^-2,
// with f^2 = W3^2/4 + W-W+ (su(2)) or W3^2/4 - W-W+ (su(1,1)).
inline FactoredForm printed_rank1(GroupId group, cplx w3, cplx wplus, cplx wminus) {
  detail::require_rank1(group);
  const cplx f2 = w3 * w3 / 4.0 + (group == GroupId::SU2 ? 1.0 : -1.0) * wminus * wplus;
  const cplx shc = detail::sinhc_from_square(f2);
  const cplx base = std::cosh(std::sqrt(f2)) - 0.5 * w3 * shc;
  return {group,
          {{detail::raising_name(group), wplus * shc / (2.0 * base)},
           {detail::diagonal_name(group), -2.0 * std::log(base)},
           {detail::lowering_name(group), wminus * shc / (2.0 * base)}}};
}

// Entry matching of a 3x3 su(2,1) element
//   U = exp(f6 D) exp(f4 G) exp(f8 A) exp(f0 C) exp(f1 K) exp(f2 F) exp(f7 B) exp(f3 J) exp(f5 E)
// with f0 = 0. The upper factors give [[1, f8, f6], [0, 1, f4], [0, 0, 1]], the lower ones
// [[1, 0, 0], [f7, 1, 0], [-f5, -f3, 1]], the diagonal diag(e^{f2/2}, e^{f1/2}, e^{-(f1+f2)/2}).
inline FactoredForm factor_su21(const CMatrix& u, double t = 0.0) {
  detail::check_square(u, 3, "factor_su21");
  const cplx d3 = u(2, 2);
  detail::require_pivot(d3, u, "U33", t);
  const cplx f6 = u(0, 2) / d3;
  const cplx f4 = u(1, 2) / d3;
  const cplx f5 = -u(2, 0) / d3;
  const cplx f3 = -u(2, 1) / d3;
  const cplx d2 = u(1, 1) - u(1, 2) * u(2, 1) / d3;
  detail::require_pivot(d2, u, "U22 - U23 U32 / U33", t);
  const cplx f7 = (u(1, 0) - u(1, 2) * u(2, 0) / d3) / d2;
  const cplx f8 = (u(0, 1) - u(0, 2) * u(2, 1) / d3) / d2;
  const cplx d1 = u(0, 0) - f8 * d2 * f7 - u(0, 2) * u(2, 0) / d3;
  detail::require_pivot(d1, u, "first diagonal", t);
  return {GroupId::SU21,
          {{"D", f6},
           {"G", f4},
           {"A", f8},
           {"C", 0.0},
           {"K", 2.0 * std::log(d2)},
           {"F", 2.0 * std::log(d1)},
           {"B", f7},
           {"J", f3},
           {"E", f5}}};
}

inline FactoredForm disentangle_su21(const InteractionForm& form, double t) {
  if (form.group != GroupId::SU21) throw model_error("disentangle_su21: interaction form is not su(2,1)");
  return factor_su21(expm(form.exponent(t)), t);
}

// f4 and f6 as eigenvector quotients
//   f6 = sum_i r_i[v] l_i[s] e^{t lambda_i} / sum_i r_i[s] l_i[s] e^{t lambda_i}
//   f4 = sum_i r_i[a] l_i[s] e^{t lambda_i} / sum_i r_i[s] l_i[s] e^{t lambda_i}
// from the biorthogonal eigensystem of the exponent's rate matrix (basis order v, a, s).
struct EigenQuotients {
  cplx f4;
  cplx f6;
  Eigensystem system;
};

inline EigenQuotients su21_eigen_quotients(const InteractionForm& form, double t) {
  if (form.group != GroupId::SU21) throw model_error("su21_eigen_quotients: interaction form is not su(2,1)");
  Eigensystem es = eig(form.rate_matrix());
  cplx num6 = 0.0, num4 = 0.0, den = 0.0;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const cplx e = std::exp(t * es.eigenvalues[i]);
    num6 += es.right[i](0) * es.left[i](2) * e;
    num4 += es.right[i](1) * es.left[i](2) * e;
    den += es.right[i](2) * es.left[i](2) * e;
  }
  if (den == cplx{}) throw singularity_error("su21_eigen_quotients: vanishing denominator", t);
  return {num4 / den, num6 / den, std::move(es)};
}

// Parameters of the su(3) decomposition
//   e^M = exp(abar E) exp(bbar J) exp(gbar B) exp(2C ln delta) exp(2(C + 2K - 3F) ln eps)
//         exp(gamma A) exp(beta G) exp(alpha D).
struct Su3Parameters {
  cplx alpha, beta, gamma, alpha_bar, beta_bar, gamma_bar, ln_delta, ln_epsilon;
};

// Lower * diag * upper matching. With the representation used here the diagonal part is
// diag(delta eps^-2, eps / delta, eps), so ln eps = ln d3 and ln delta = ln d1 + 2 ln d3.
inline FactoredForm factor_su3(const CMatrix& u, double t = 0.0) {
  detail::check_square(u, 3, "factor_su3");
  const cplx d1 = u(0, 0);
  detail::require_pivot(d1, u, "U11", t);
  const cplx gamma = u(0, 1) / d1;
  const cplx gamma_bar = u(1, 0) / d1;
  const cplx d2 = u(1, 1) - u(1, 0) * u(0, 1) / d1;
  detail::require_pivot(d2, u, "U22 - U21 U12 / U11", t);
  const cplx beta = (u(1, 2) - u(1, 0) * u(0, 2) / d1) / d2;
  const cplx beta_bar = (u(2, 1) - u(2, 0) * u(0, 1) / d1) / d2;
  const cplx alpha = u(0, 2) / d1 - gamma * beta;
  const cplx alpha_bar = u(2, 0) / d1 - beta_bar * gamma_bar;
  const cplx d3 = u(2, 2) - u(2, 0) * u(0, 2) / d1 - beta_bar * d2 * beta;
  detail::require_pivot(d3, u, "third diagonal", t);
  const cplx ln_eps = std::log(d3);
  const cplx ln_delta = std::log(d1) + 2.0 * ln_eps;
  return {GroupId::SU3,
          {{"E", alpha_bar},
           {"J", beta_bar},
           {"B", gamma_bar},
           {"C", 2.0 * ln_delta},
           {"C+2K-3F", 2.0 * ln_eps},
           {"A", gamma},
           {"G", beta},
           {"D", alpha}}};
}

inline FactoredForm disentangle_su3(const CMatrix& m, double t) {
  detail::check_square(m, 3, "disentangle_su3");
  return factor_su3(expm(m, t), t);
}

inline Su3Parameters su3_parameters(const FactoredForm& f) {
  if (f.group != GroupId::SU3) throw structure_error("su3_parameters: not an su(3) factorization");
  return {f.coefficient("D"), f.coefficient("G"), f.coefficient("A"), f.coefficient("E"), f.coefficient("J"),
          f.coefficient("B"), f.coefficient("C") / 2.0, f.coefficient("C+2K-3F") / 2.0};
}

// Factorization of an arbitrary group element in the group's canonical order.
inline FactoredForm factor(GroupId group, const CMatrix& u, double t = 0.0) {
  switch (group) {
    case GroupId::SU2:
    case GroupId::SU11: return factor_rank1(group, u, t);
    case GroupId::SU21: return factor_su21(u, t);
    case GroupId::SU3: return factor_su3(u, t);
  }
  throw structure_error("unknown group");
}

// Disentangles the interaction exponent of a reduced model at time t.
inline FactoredForm disentangle(const InteractionForm& form, double t) {
  switch (form.group) {
    case GroupId::SU2:
    case GroupId::SU11: {
      const auto& r = form.rates;
      const char* d = detail::diagonal_name(form.group);
      auto rate = [&](const char* g) {
        const auto it = r.find(g);
        return it == r.end() ? cplx{} : it->second;
      };
      return disentangle_rank1(form.group, t * rate(d), t * rate(detail::raising_name(form.group)),
                               t * rate(detail::lowering_name(form.group)), t);
    }
    case GroupId::SU21: return disentangle_su21(form, t);
    case GroupId::SU3: return disentangle_su3(form.rate_matrix(), t);
  }
  throw structure_error("unknown group");
}

// Sequential post-pass over a sweep: shifts each diagonal-factor coefficient by multiples of
// the branch period so consecutive points are as close as possible. The first point keeps
// the principal branch.
inline void continue_branches(std::vector<FactoredForm>& sweep) {
  if (sweep.empty()) return;
  const GeneratorSet set = generators(sweep.front().group);
  const double period = kDiagonalBranchPeriod.imag();
  for (std::size_t k = 1; k < sweep.size(); ++k) {
    auto& cur = sweep[k].factors;
    const auto& prev = sweep[k - 1].factors;
    if (cur.size() != prev.size()) throw structure_error("continue_branches: inconsistent factor lists");
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (!set.matrix(cur[i].generator).is_diagonal()) continue;
      const double jump = std::round((prev[i].coeff.imag() - cur[i].coeff.imag()) / period);
      cur[i].coeff += cplx(0.0, jump * period);
    }
  }
}

inline std::vector<FactoredForm> disentangle_sweep(const InteractionForm& form, std::span<const double> times) {
  std::vector<FactoredForm> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(disentangle(form, t));
  continue_branches(out);
  return out;
}

}  // namespace quadham

#endif  // QUADHAM_DISENTANGLE_HPP
