#ifndef QUADHAM_VALIDATION_HPP
#define QUADHAM_VALIDATION_HPP

// The acceptance suite: closed forms against the Fock oracle, factorization identities,
// convergence of the time-ordered evolution, and the table of published-formula discrepancies.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "disentangle.hpp"
#include "fock.hpp"
#include "models.hpp"
#include "smallmat.hpp"
#include "transition.hpp"

namespace quadham {

struct ValidationOptions {
  int fc_nmax = 8;
  int pa_nmax = 60;
  int raman_nmax = 14;
  int timedep_nmax_two_mode = 6;
  int timedep_nmax_raman = 4;
  double dt = 0.05;
  std::uint64_t seed = 1234567;
};

// Tolerances and time budgets.
namespace limits {
inline constexpr double factorization_residual = 1e-10;
inline constexpr double converter_error = 1e-9;
inline constexpr double amplifier_error = 1e-6;
inline constexpr double amplifier_period_error = 1e-6;
inline constexpr double raman_error = 1e-6;
inline constexpr double selection_rule_leak = 1e-8;
inline constexpr double dual_route_error = 1e-11;
inline constexpr double convergence_order = 1.9;
inline constexpr double ledger_distinct = 1e-6;
inline constexpr double algebra_seconds = 1.0;
inline constexpr double factorization_seconds = 5.0;
inline constexpr double convergence_seconds = 60.0;
}  // namespace limits

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string summary;
  std::vector<std::string> details;
  double seconds = 0.0;
};

struct ValidationReport {
  std::vector<CriterionResult> criteria;
  bool all_passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.passed; });
  }
};

inline const std::vector<std::string>& criterion_names() {
  static const std::vector<std::string> names = {
      "algebra-exactness",      "factorization-identity", "converter-swap",
      "amplifier-regimes",      "raman-vacuum",           "su3-dual-route",
      "interaction-picture-convergence", "discrepancy-ledger"};
  return names;
}

namespace detail {

inline std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

inline std::string sci(double x) { return fmt("%.3e", x); }

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline cplx random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  return {re, n(rng)};
}

// Random element of the algebra with Frobenius norm uniform in [0, max_norm].
inline Coefficients random_coefficients(const GeneratorSet& set, std::mt19937_64& rng, double max_norm) {
  Coefficients c;
  for (const auto& g : set.generators) c[g.name] = random_complex(rng);
  const double n = assemble(c, set).norm();
  const double r = std::uniform_real_distribution<double>(0.0, max_norm)(rng);
  for (auto& [name, v] : c) v *= r / n;
  return c;
}

// Doubles n_max from start until the edge population at t is below tol (or cap is reached).
inline int adaptive_nmax(const ModelSpec& spec, const FockState& initial, const std::vector<double>& times,
                         int start, int cap, double tol) {
  int n = start;
  for (;;) {
    const SectorPropagator p(interaction_hamiltonian(spec), FockBasis(spec.n_modes(), n), initial);
    double edge = 0.0;
    for (double t : times) edge = std::max(edge, p.edge_population(p.evolve(t)));
    if (edge < tol || n >= cap) return n;
    n = std::min(2 * n, cap);
  }
}

template <typename Fn>
CriterionResult run_criterion(int id, Fn&& body) {
  CriterionResult r;
  r.id = id;
  r.name = criterion_names().at(static_cast<std::size_t>(id - 1));
  const Stopwatch sw;
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.summary = std::string("error: ") + e.what();
  }
  r.seconds = sw.seconds();
  return r;
}

}  // namespace detail

inline CriterionResult check_algebra(const ValidationOptions&) {
  return detail::run_criterion(1, [](CriterionResult& r) {
    const detail::Stopwatch sw;
    bool ok = true;
    int relations = 0;
    for (GroupId g : {GroupId::SU2, GroupId::SU11, GroupId::SU21, GroupId::SU3}) {
      const GeneratorSet set = generators(g);
      const bool table = commutator_table(set) == set.structure_constants;
      int bad = 0;
      for (const auto& rel : printed_relations(g)) {
        ++relations;
        if (!holds(set, rel)) {
          ++bad;
          r.details.push_back(to_string(g) + " relation fails: " + rel.label);
        }
      }
      ok = ok && table && bad == 0;
      r.details.push_back(to_string(g) + ": table " + (table ? "exact" : "MISMATCH") + ", " +
                          std::to_string(printed_relations(g).size() - static_cast<std::size_t>(bad)) + "/" +
                          std::to_string(printed_relations(g).size()) + " relations");
    }
    const double s = sw.seconds();
    r.passed = ok && s < limits::algebra_seconds;
    r.summary = "4 structure tables and " + std::to_string(relations) + " relations in exact arithmetic, " +
                detail::fmt("%.3f s", s);
  });
}

inline CriterionResult check_factorization(const ValidationOptions& o) {
  return detail::run_criterion(2, [&](CriterionResult& r) {
    const detail::Stopwatch sw;
    std::mt19937_64 rng(o.seed);
    double worst = 0.0;
    int failures = 0;
    for (GroupId g : {GroupId::SU2, GroupId::SU11, GroupId::SU21, GroupId::SU3}) {
      const GeneratorSet set = generators(g);
      double gw = 0.0;
      for (int draw = 0; draw < 100; ++draw) {
        const Coefficients c = detail::random_coefficients(set, rng, 2.0);
        const CMatrix x = assemble(c, set);
        const CMatrix direct = expm_taylor(x);
        double res;
        try {
          FactoredForm f;
          if (g == GroupId::SU2 || g == GroupId::SU11) {
            const bool su2 = g == GroupId::SU2;
            f = disentangle_rank1(g, c.at(su2 ? "J3" : "K3"), c.at(su2 ? "J+" : "K+"), c.at(su2 ? "J-" : "K-"));
          } else {
            f = factor(g, expm(x));
          }
          res = verify_factorization(f, direct);
        } catch (const singularity_error&) {
          res = INFINITY;
        }
        if (!(res < limits::factorization_residual)) ++failures;
        gw = std::max(gw, res);
      }
      r.details.push_back(to_string(g) + ": max residual " + detail::sci(gw) + " over 100 draws");
      worst = std::max(worst, gw);
    }
    const double s = sw.seconds();
    r.passed = failures == 0 && s < limits::factorization_seconds;
    r.summary = "max residual " + detail::sci(worst) + " (< 1e-10), " + std::to_string(failures) + " failures, " +
                detail::fmt("%.3f s", s);
  });
}

inline CriterionResult check_converter(const ValidationOptions& o) {
  return detail::run_criterion(3, [&](CriterionResult& r) {
    double worst = 0.0;
    const auto grid = detail::linspace(0.0, 5.0, 20);
    for (int n = 1; n <= 4; ++n)
      for (double k : {0.5, 1.0, 2.0})
        for (double delta : {0.0, 1.0, 3.0}) {
          const ModelSpec spec = ModelSpec::frequency_converter(k, delta);
          const TransitionOracle oracle(spec, {n, 0}, o.fc_nmax);
          for (double t : grid)
            worst = std::max(worst, std::abs(fc_swap_probability(n, k, delta, t) - oracle.probability({0, n}, t)));
        }
    const double t_anchor = std::numbers::pi / 2;
    const double anchor = fc_swap_probability(1, 1.0, 0.0, t_anchor);
    const double anchor_oracle = oracle_probability(ModelSpec::frequency_converter(1.0, 0.0), {1, 0}, {0, 1}, t_anchor,
                                                    o.fc_nmax);
    r.details.push_back("anchor N=1, Delta=0, kt=pi/2: closed " + detail::fmt("%.15f", anchor) + ", oracle " +
                        detail::fmt("%.15f", anchor_oracle));
    r.passed = worst < limits::converter_error && std::abs(anchor - 1.0) < 1e-12 && std::abs(anchor_oracle - 1.0) < 1e-9;
    r.summary = "max |closed - oracle| " + detail::sci(worst) + " over 36 parameter sets x 20 times (< 1e-9)";
  });
}

inline CriterionResult check_amplifier(const ValidationOptions& o) {
  return detail::run_criterion(4, [&](CriterionResult& r) {
    bool ok = pa_regime(1, 3) == Regime::Oscillatory && pa_regime(2, 2) == Regime::Growth &&
              pa_regime(1, 2) == Regime::Critical;
    r.details.push_back(std::string("regimes (1,3) (2,2) (1,2): ") + to_string(pa_regime(1, 3)) + " " +
                        to_string(pa_regime(2, 2)) + " " + to_string(pa_regime(1, 2)));

    // bounded oscillation
    {
      const ModelSpec spec = ModelSpec::parametric_amplifier(1.0, 3.0);
      const auto grid = detail::linspace(0.0, 50.0, 1001);
      const int n = detail::adaptive_nmax(spec, {0, 0}, grid, 16, 1024, 1e-10);
      const TransitionOracle oracle(spec, {0, 0}, n);
      const double period = std::numbers::pi / std::sqrt(spec.delta * spec.delta / 4 - spec.k * spec.k);
      double pmax = 0.0, drift = 0.0;
      for (double t : grid) {
        const double p = oracle.probability({1, 1}, t);
        pmax = std::max(pmax, p);
        if (t + period <= 50.0) drift = std::max(drift, std::abs(p - oracle.probability({1, 1}, t + period)));
      }
      const bool b = pmax < 1.0 && drift < limits::amplifier_period_error;
      ok = ok && b;
      r.details.push_back("(k, Delta) = (1, 3), n_max " + std::to_string(n) + ": max P " + detail::fmt("%.6f", pmax) +
                          " on [0, 50], periodicity error " + detail::sci(drift));
    }
    // growth
    {
      const ModelSpec spec = ModelSpec::parametric_amplifier(2.0, 2.0);
      const int n = detail::adaptive_nmax(spec, {0, 0}, {1.5}, 64, 2048, 1e-8);
      const SectorPropagator p(interaction_hamiltonian(spec), FockBasis(2, n), {0, 0});
      const double m1 = p.mean_occupation(0, p.evolve(1.5));
      const double m2 = p.mean_occupation(0, p.evolve(3.0));
      const double f = std::sqrt(spec.k * spec.k - spec.delta * spec.delta / 4);
      auto exact = [&](double t) { return spec.k * spec.k / (f * f) * std::pow(std::sinh(f * t), 2); };
      const bool b = m2 > std::numbers::e * m1;
      ok = ok && b;
      r.details.push_back("(k, Delta) = (2, 2), n_max " + std::to_string(n) + ": mean n_a " + detail::fmt("%.4f", m1) +
                          " at t=1.5 and " + detail::fmt("%.4f", m2) + " at t=3 (ratio " +
                          detail::fmt("%.3f", m2 / m1) + "; untruncated " + detail::fmt("%.4f", exact(1.5)) + " and " +
                          detail::fmt("%.1f", exact(3.0)) + ")");
    }
    // closed form against the oracle at the configured truncation
    {
      double worst = 0.0;
      for (double k : {0.5, 0.8, 1.0})
        for (double delta : {0.0, 0.7, 3.0}) {
          const ModelSpec spec = ModelSpec::parametric_amplifier(k, delta);
          const TransitionOracle oracle(spec, {0, 0}, o.pa_nmax);
          for (double t : detail::linspace(0.0, 2.0 / k, 20))
            worst = std::max(worst, std::abs(pa_from_vacuum(1, 1, spec, t).prob_closed - oracle.probability({1, 1}, t)));
        }
      const bool b = worst < limits::amplifier_error;
      ok = ok && b;
      r.details.push_back("truncation deficit at n_max " + std::to_string(o.pa_nmax) + ": max |closed - oracle| " +
                          detail::sci(worst) + " for kt <= 2 (< 1e-6)" + (b ? "" : " FAILED"));
    }
    r.passed = ok;
    r.summary = "regimes, bounded oscillation, growth envelope and vacuum-pair probability";
  });
}

inline CriterionResult check_raman(const ValidationOptions& o) {
  return detail::run_criterion(5, [&](CriterionResult& r) {
    bool ok = true;
    const std::vector<ModelSpec> sets = {ModelSpec::raman(0.6, 0.4, 0.3, 0.1), ModelSpec::raman(0.3, 0.7, -0.2, 0.5)};
    double worst = 0.0;
    for (const auto& spec : sets) {
      const TransitionOracle oracle(spec, {0, 0, 0}, o.raman_nmax);
      for (double t : detail::linspace(0.0, 1.2, 20))
        for (int ms = 0; ms <= 3; ++ms)
          for (int mv = 0; mv <= 3; ++mv)
            for (int ma = 0; ma <= 3; ++ma)
              worst = std::max(worst, std::abs(raman_from_vacuum(mv, ms, ma, spec, t).prob_closed -
                                               oracle.probability({mv, ms, ma}, t)));
    }
    ok = worst < limits::raman_error;
    r.details.push_back("closed form vs oracle (n_max " + std::to_string(o.raman_nmax) +
                        ", m <= 3, two coupling sets): " + detail::sci(worst) + " (< 1e-6)");

    // Selection rule from a dense propagation over the whole truncated space, no sector split.
    {
      const int n = std::min(o.raman_nmax, 5);
      const FockBasis basis(3, n);
      double leak = 0.0;
      for (const auto& spec : sets) {
        const HermitianSpectrum hs = hermitian_spectrum(CMatrix(operator_matrix(interaction_hamiltonian(spec), basis)));
        CVector e0 = CVector::Zero(static_cast<Eigen::Index>(basis.size()));
        e0(static_cast<Eigen::Index>(basis.index({0, 0, 0}))) = 1.0;
        for (double t : detail::linspace(0.0, 1.2, 20)) {
          const CVector psi = hs.evolve(e0, t);
          for (std::size_t i = 0; i < basis.size(); ++i) {
            const FockState s = basis.state(i);
            if (s[1] != s[0] + s[2]) leak = std::max(leak, std::norm(psi(static_cast<Eigen::Index>(i))));
          }
        }
      }
      const bool b = leak < limits::selection_rule_leak;
      ok = ok && b;
      r.details.push_back("selection rule: max probability of a violating final " + detail::sci(leak) +
                          " (dense, n_max " + std::to_string(n) + ")");
    }
    // Conserved quantity.
    {
      const FockBasis basis(3, o.raman_nmax);
      const SparseMatrix q = operator_matrix(weighted_number({1.0, -1.0, 1.0}), basis);
      double c = 0.0;
      for (const auto& spec : sets) c = std::max(c, commutator_max_abs(operator_matrix(interaction_hamiltonian(spec), basis), q));
      ok = ok && c == 0.0;
      r.details.push_back("max |[H_I, n_v + n_a - n_s]| = " + detail::sci(c));
    }
    r.passed = ok;
    r.summary = "selection rule, vacuum probabilities and conserved quantity";
  });
}

inline CriterionResult check_su3(const ValidationOptions& o) {
  return detail::run_criterion(6, [&](CriterionResult& r) {
    std::mt19937_64 rng(o.seed + 6);
    std::uniform_real_distribution<double> gd(-2.0, 2.0), td(0.0, 3.0);
    double pair = 0.0, entry = 0.0;
    for (int draw = 0; draw < 50; ++draw) {
      const double g1 = gd(rng), g2 = gd(rng), g3 = gd(rng), t = td(rng);
      const CMatrix m = su3_coupling_matrix(g1, g2, g3);
      const CMatrix spectral = expm_spectral(m, t);
      const CMatrix eigen = eig(m).exp(t);
      const CMatrix generic = expm_taylor(m, t);
      pair = std::max({pair, (spectral - eigen).cwiseAbs().maxCoeff(), (spectral - generic).cwiseAbs().maxCoeff(),
                       (eigen - generic).cwiseAbs().maxCoeff()});
      const double s = g1 * g1 + g2 * g2 + g3 * g3;
      const double e11 = g2 * g2 / s + (g1 * g1 + g3 * g3) / s * std::cos(std::sqrt(s) * t);
      entry = std::max(entry, std::abs(generic(0, 0) - e11));
    }
    r.passed = pair < limits::dual_route_error && entry < limits::dual_route_error;
    r.details.push_back("spectral weights / eigenvectors / scaling-and-squaring: max pairwise " + detail::sci(pair));
    r.details.push_back("(1,1) entry closed form: max error " + detail::sci(entry));
    r.summary = "50 random draws, routes agree to " + detail::sci(std::max(pair, entry)) + " (< 1e-11)";
  });
}

inline CriterionResult check_convergence(const ValidationOptions& o) {
  return detail::run_criterion(7, [&](CriterionResult& r) {
    const detail::Stopwatch sw;
    const double t = 1.0;
    bool ok = true;
    double min_order = INFINITY;
    const std::vector<ModelSpec> specs = {ModelSpec::frequency_converter(1.0, 0.5),
                                          ModelSpec::parametric_amplifier(0.5, 0.4),
                                          ModelSpec::raman(0.3, 0.4, 0.2, 0.1)};
    for (const auto& spec : specs) {
      const int n = spec.n_modes() == 2 ? o.timedep_nmax_two_mode : o.timedep_nmax_raman;
      const FockBasis basis(spec.n_modes(), n);
      const BlockUnitary ref = reference_propagator(spec, basis, t);
      double e[3];
      for (int i = 0; i < 3; ++i)
        e[i] = operator_norm_difference(evolve_timedep(spec, basis, t, o.dt / std::ldexp(1.0, i)), ref);
      const double p1 = std::log2(e[0] / e[1]), p2 = std::log2(e[1] / e[2]);
      const double order = std::min(p1, p2);
      min_order = std::min(min_order, order);
      ok = ok && order >= limits::convergence_order;
      r.details.push_back(to_string(spec.model) + " (n_max " + std::to_string(n) + "): errors " + detail::sci(e[0]) +
                          " " + detail::sci(e[1]) + " " + detail::sci(e[2]) + ", orders " + detail::fmt("%.3f", p1) +
                          " " + detail::fmt("%.3f", p2));
    }
    const double s = sw.seconds();
    r.passed = ok && s < limits::convergence_seconds;
    r.summary = "observed order " + detail::fmt("%.3f", min_order) + " (>= 1.9), " + detail::fmt("%.2f s", s);
  });
}

// One published-formula discrepancy measured against the oracle.
struct LedgerEntry {
  std::string label;
  std::string point;
  double printed;
  double corrected;
  double oracle;
  bool expect_differ;
  double tolerance;

  bool consistent() const {
    const bool differ = std::abs(printed - oracle) > limits::ledger_distinct;
    return differ == expect_differ && std::abs(corrected - oracle) < tolerance;
  }
};

inline std::vector<LedgerEntry> discrepancy_ledger(const ValidationOptions& o) {
  std::vector<LedgerEntry> out;
  {
    const ModelSpec s = ModelSpec::frequency_converter(1.0, 1.0);
    const TransitionResult tr = fc_from_mode_a({1, 0}, {0, 1}, s, 1.3);
    out.push_back({"rank-1 numerator factor, converter swap", "N=1 k=1 Delta=1 t=1.3", tr.prob_closed_printed,
                   tr.prob_closed, oracle_probability(s, {1, 0}, {0, 1}, 1.3, o.fc_nmax), true, 1e-9});
  }
  {
    const ModelSpec s = ModelSpec::parametric_amplifier(0.8, 0.0);
    const TransitionResult tr = pa_from_vacuum(1, 1, s, 1.1);
    const double orc = oracle_probability(s, {0, 0}, {1, 1}, 1.1, o.pa_nmax);
    out.push_back({"rank-1 numerator factor, amplifier pair", "k=0.8 Delta=0 t=1.1", tr.prob_closed_printed,
                   tr.prob_closed, orc, true, 1e-8});
    out.push_back({"su(1,1) diagonal constant omitted", "k=0.8 Delta=0 t=1.1", tr.variant("without_k3_constant"),
                   tr.prob_closed, orc, true, 1e-8});
  }
  {
    const ModelSpec s = ModelSpec::raman(0.6, 0.4, 0.3, 0.1);
    const double t = 0.9;
    const TransitionOracle oracle(s, {0, 0, 0}, o.raman_nmax);
    const TransitionResult a = raman_from_vacuum(1, 2, 1, s, t);
    const TransitionResult b = raman_from_vacuum(2, 2, 0, s, t);
    const TransitionResult c = raman_from_vacuum(1, 1, 0, s, t);
    out.push_back({"Raman combinatorial coefficient", "(1,2,1) t=0.9", a.variant("printed_coefficient"), a.prob_closed,
                   oracle.probability({1, 2, 1}, t), true, 1e-6});
    out.push_back({"Raman vacuum normalization omitted", "(1,1,0) t=0.9", c.variant("unnormalized"), c.prob_closed,
                   oracle.probability({1, 1, 0}, t), true, 1e-6});
    out.push_back({"Raman f4/f6 exponent assignment", "(2,2,0) t=0.9", b.variant("swapped_exponents"), b.prob_closed,
                   oracle.probability({2, 2, 0}, t), true, 1e-6});
    out.push_back({"Raman literal vacuum formula", "(1,1,0) t=0.9", c.prob_closed_printed, c.prob_closed,
                   oracle.probability({1, 1, 0}, t), true, 1e-6});
  }
  return out;
}

inline CriterionResult check_ledger(const ValidationOptions& o) {
  return detail::run_criterion(8, [&](CriterionResult& r) {
    bool ok = true;
    const auto entries = discrepancy_ledger(o);
    for (const auto& e : entries) {
      ok = ok && e.consistent();
      char buf[512];
      std::snprintf(buf, sizeof buf, "%-40s %-22s printed %.10f  corrected %.10f  oracle %.10f  [%s, %s]",
                    e.label.c_str(), e.point.c_str(), e.printed, e.corrected, e.oracle,
                    e.expect_differ ? "expected to differ" : "expected to agree", e.consistent() ? "as documented" : "NOT as documented");
      r.details.push_back(buf);
    }
    r.passed = ok;
    r.summary = std::to_string(entries.size()) + " discrepancies measured against the oracle";
  });
}

inline CriterionResult run_criterion(int id, const ValidationOptions& o) {
  switch (id) {
    case 1: return check_algebra(o);
    case 2: return check_factorization(o);
    case 3: return check_converter(o);
    case 4: return check_amplifier(o);
    case 5: return check_raman(o);
    case 6: return check_su3(o);
    case 7: return check_convergence(o);
    case 8: return check_ledger(o);
  }
  throw lookup_error("no criterion " + std::to_string(id));
}

inline ValidationReport run_validation(const ValidationOptions& o = {}) {
  ValidationReport rep;
  for (int id = 1; id <= 8; ++id) rep.criteria.push_back(run_criterion(id, o));
  return rep;
}

inline std::string format_line(const CriterionResult& c) {
  return std::string(c.passed ? "PASS" : "FAIL") + "  " + std::to_string(c.id) + " " + c.name + ": " + c.summary;
}

}  // namespace quadham

#endif  // QUADHAM_VALIDATION_HPP
