#ifndef QUADHAM_TRANSITION_HPP
#define QUADHAM_TRANSITION_HPP

// Closed-form transition probabilities between number states, assembled from the
// disentangled coefficients, plus the regime classification of the amplifier.

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "disentangle.hpp"
#include "errors.hpp"
#include "fock.hpp"
#include "models.hpp"
#include "smallmat.hpp"

namespace quadham {

struct TransitionResult {
  FockState initial;
  FockState final_state;
  double t = 0.0;
  double prob_closed = 0.0;
  // The literal published expression; NaN where none exists for the transition.
  double prob_closed_printed = std::numeric_limits<double>::quiet_NaN();
  // Scalar picked up by the vacuum from the constant parts of the diagonal generators.
  cplx normalization = 1.0;
  std::optional<double> prob_oracle;
  std::string note;
  std::vector<std::pair<std::string, double>> variants;

  double variant(const std::string& name) const {
    for (const auto& [n, v] : variants)
      if (n == name) return v;
    throw lookup_error("no variant '" + name + "'");
  }
};

namespace detail {

// n! / (k! (n - k)!) in floating point.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= std::min(k, n - k); ++i) r = r * (n - std::min(k, n - k) + i) / i;
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

inline int total(const FockState& s) { return std::accumulate(s.begin(), s.end(), 0); }

inline void require_model(const ModelSpec& spec, ModelId m, const char* who) {
  if (spec.model != m) throw model_error(std::string(who) + ": expected a " + to_string(m) + " spec");
}

inline void require_states(const ModelSpec& spec, const FockState& a, const FockState& b) {
  for (const FockState* s : {&a, &b}) {
    if (s->size() != spec.n_modes())
      throw index_error("state " + to_string(*s) + " does not match the " + std::to_string(spec.n_modes()) +
                        "-mode model");
    for (int n : *s)
      if (n < 0) throw index_error("negative occupation in " + to_string(*s));
  }
}

}  // namespace detail

// [k^2 sin^2(Omega t) / Omega^2]^N with Omega^2 = k^2 + Delta^2/4: |N, 0> -> |0, N>.
inline double fc_swap_probability(int n, double k, double delta, double t) {
  if (n < 0) throw index_error("fc_swap_probability: negative photon number");
  if (n == 0) return 1.0;
  const double omega = std::hypot(k, delta / 2);
  const double x = omega * t;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return std::pow(k * t * sinc * k * t * sinc, n);
}

// The published form [k sin(Omega t) / (2 Omega)]^{2N}.
inline double fc_swap_probability_printed(int n, double k, double delta, double t) {
  return n == 0 ? 1.0 : fc_swap_probability(n, k, delta, t) / std::pow(4.0, n);
}

enum class Regime { Oscillatory, Growth, Critical };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::Oscillatory: return "Oscillatory";
    case Regime::Growth: return "Growth";
    case Regime::Critical: return "Critical";
  }
  return "?";
}

// Oscillatory iff k^2 < (Delta/2)^2, Growth iff k^2 > (Delta/2)^2, Critical within 1e-12 relative.
inline Regime pa_regime(double k, double delta) {
  const double a = k * k, b = delta * delta / 4;
  if (std::abs(a - b) <= 1e-12 * std::max(a, b)) return Regime::Critical;
  return a < b ? Regime::Oscillatory : Regime::Growth;
}

// |0,0> -> |n,n> of the amplifier from the su(1,1) factors:
// exp(Y+ K+) Y3^{K3} exp(Y- K-) |0,0> = Y3^{1/2} exp(Y+ a^dag b^dag) |0,0>,
// so P = |Y+|^{2n} |Y3|. Unequal occupations are unreachable.
inline TransitionResult pa_from_vacuum(int n_a, int n_b, const ModelSpec& spec, double t) {
  detail::require_model(spec, ModelId::ParametricAmplifier, "pa_from_vacuum");
  TransitionResult r;
  r.initial = {0, 0};
  r.final_state = {n_a, n_b};
  r.t = t;
  detail::require_states(spec, r.initial, r.final_state);
  const InteractionForm form = reduce(spec);
  const FactoredForm f = disentangle(form, t);
  const cplx yp = f.coefficient("K+");
  const cplx y3 = std::exp(f.coefficient("K3"));
  r.normalization = std::sqrt(y3);
  if (n_a != n_b) {
    r.prob_closed = 0.0;
    r.prob_closed_printed = 0.0;
    r.note = "unreachable: n_a - n_b is conserved";
    return r;
  }
  const int n = n_a;
  r.prob_closed = std::pow(std::norm(yp), n) * std::abs(y3);
  r.variants.emplace_back("without_k3_constant", std::pow(std::norm(yp), n));
  if (n == 1) {
    const auto& rt = form.rates;
    const FactoredForm p = printed_rank1(GroupId::SU11, t * rt.at("K3"), t * rt.at("K+"), t * rt.at("K-"));
    r.prob_closed_printed = std::norm(p.coefficient("K+"));
  }
  return r;
}

inline double pa_vac_to_11_probability(double k, double delta, double t) {
  return pa_from_vacuum(1, 1, ModelSpec::parametric_amplifier(k, delta), t).prob_closed;
}

// |N, 0> -> |N - j, j> of the converter. The swap (j = N) is the closed form above; the
// general case uses a^dag -> U11 a^dag + U21 b^dag with U the 2x2 group element.
inline TransitionResult fc_from_mode_a(const FockState& initial, const FockState& final_state, const ModelSpec& spec,
                                       double t) {
  detail::require_model(spec, ModelId::FrequencyConverter, "fc_from_mode_a");
  detail::require_states(spec, initial, final_state);
  if (initial[1] != 0) throw model_error("closed form needs an initial state |N,0>");
  TransitionResult r;
  r.initial = initial;
  r.final_state = final_state;
  r.t = t;
  const int n = initial[0];
  if (detail::total(final_state) != n) {
    r.prob_closed = 0.0;
    r.note = "unreachable: n_a + n_b is conserved";
    return r;
  }
  const int j = final_state[1];
  if (j == n) {
    r.prob_closed = fc_swap_probability(n, spec.k, spec.delta, t);
    r.prob_closed_printed = fc_swap_probability_printed(n, spec.k, spec.delta, t);
  }
  const InteractionForm form = reduce(spec);
  const auto& rt = form.rates;
  const CMatrix u = rank1_group_element(GroupId::SU2, t * rt.at("J3"), t * rt.at("J+"), t * rt.at("J-"));
  if (j != n) {
    r.prob_closed =
        detail::binomial(n, j) * std::pow(std::norm(u(0, 0)), n - j) * std::pow(std::norm(u(1, 0)), j);
    return r;
  }
  // From the factors the swap amplitude is (X-)^N e^{-N ln X3 / 2}; absent where U22 = 0.
  try {
    const FactoredForm f = factor_rank1(GroupId::SU2, u, t);
    r.variants.emplace_back("from_factors",
                            std::norm(std::pow(f.coefficient("J-"), n) * std::exp(-0.5 * n * f.coefficient("J3"))));
  } catch (const singularity_error&) {
    r.note = "factorization singular at this t";
  }
  return r;
}

// |0,0,0> -> |m_v, m_s, m_a> of the Raman model. The factored vacuum is
//   e^{(f1 + f2)/2} exp(f6 v^dag s^dag) exp(f4 a^dag s^dag) |0>,
// so P = m_s! / (m_v! m_a!) |f6|^{2 m_v} |f4|^{2 m_a} |e^{(f1 + f2)/2}|^2 when m_s = m_v + m_a.
inline TransitionResult raman_from_vacuum(int m_v, int m_s, int m_a, const ModelSpec& spec, double t) {
  detail::require_model(spec, ModelId::Raman, "raman_from_vacuum");
  TransitionResult r;
  r.initial = {0, 0, 0};
  r.final_state = {m_v, m_s, m_a};
  r.t = t;
  detail::require_states(spec, r.initial, r.final_state);
  const FactoredForm f = disentangle_su21(reduce(spec), t);
  const cplx f4 = f.coefficient("G"), f6 = f.coefficient("D");
  r.normalization = std::exp(0.5 * (f.coefficient("K") + f.coefficient("F")));
  if (m_s != m_v + m_a) {
    r.prob_closed = 0.0;
    r.prob_closed_printed = 0.0;
    r.note = "selection rule: m_s != m_v + m_a";
    return r;
  }
  const double norm2 = std::norm(r.normalization);
  const double derived = detail::binomial(m_s, m_a);
  const double printed = detail::factorial(m_a) / (detail::factorial(m_s) * detail::factorial(m_s - m_a));
  const double body = std::pow(std::norm(f6), m_v) * std::pow(std::norm(f4), m_a);
  const double swapped = std::pow(std::norm(f4), m_v) * std::pow(std::norm(f6), m_a);
  r.prob_closed = derived * body * norm2;
  r.prob_closed_printed = printed * swapped;
  r.variants = {{"unnormalized", derived * body},
                {"printed_coefficient", printed * body * norm2},
                {"swapped_exponents", derived * swapped * norm2}};
  return r;
}

// One-photon transitions of the su(3) model: the single-photon amplitudes are the entries
// of e^{tM}, evaluated through the spectral weights.
inline TransitionResult su3_one_photon(const FockState& initial, const FockState& final_state, const ModelSpec& spec,
                                       double t) {
  detail::require_model(spec, ModelId::SU3Hypothetical, "su3_one_photon");
  detail::require_states(spec, initial, final_state);
  if (detail::total(initial) != 1) throw model_error("closed form needs a one-photon initial state");
  TransitionResult r;
  r.initial = initial;
  r.final_state = final_state;
  r.t = t;
  if (detail::total(final_state) != 1) {
    r.note = "unreachable: total photon number is conserved";
    return r;
  }
  const OscillatorRealization rz = realization(ModelId::SU3Hypothetical);
  auto slot = [&](const FockState& s) {
    for (std::size_t i = 0; i < rz.slots.size(); ++i)
      if (s[rz.slots[i].mode] == 1) return static_cast<Eigen::Index>(i);
    return Eigen::Index{-1};
  };
  const CMatrix m = su3_coupling_matrix(spec.g1, spec.g2, spec.g3);
  CMatrix u;
  try {
    u = expm_spectral(m, t);
  } catch (const degeneracy_error&) {
    u = expm_taylor(m, t);
    r.note = "degenerate spectrum: scaling and squaring";
  }
  r.prob_closed = std::norm(u(slot(final_state), slot(initial)));
  return r;
}

// Dispatch over the transitions with a closed form.
inline TransitionResult closed_form(const ModelSpec& spec, const FockState& initial, const FockState& final_state,
                                    double t) {
  detail::require_states(spec, initial, final_state);
  switch (spec.model) {
    case ModelId::FrequencyConverter: return fc_from_mode_a(initial, final_state, spec, t);
    case ModelId::ParametricAmplifier:
      if (initial != FockState{0, 0}) throw model_error("closed form needs the vacuum as initial state");
      return pa_from_vacuum(final_state[0], final_state[1], spec, t);
    case ModelId::Raman:
      if (initial != FockState{0, 0, 0}) throw model_error("closed form needs the vacuum as initial state");
      return raman_from_vacuum(final_state[0], final_state[1], final_state[2], spec, t);
    case ModelId::SU3Hypothetical: return su3_one_photon(initial, final_state, spec, t);
  }
  throw model_error("unknown model");
}

// Oracle probabilities |<final| e^{-i H_I t} |initial>|^2 from one sector eigendecomposition.
class TransitionOracle {
 public:
  TransitionOracle(const ModelSpec& spec, const FockState& initial, int n_max, std::size_t block_cap = kDefaultBlockCap)
      : prop_(interaction_hamiltonian(spec), FockBasis(spec.n_modes(), n_max), initial, block_cap) {}

  double probability(const FockState& final_state, double t) const { return std::norm(prop_.amplitude(final_state, t)); }
  const SectorPropagator& propagator() const { return prop_; }

 private:
  SectorPropagator prop_;
};

inline double oracle_probability(const ModelSpec& spec, const FockState& initial, const FockState& final_state,
                                 double t, int n_max) {
  return TransitionOracle(spec, initial, n_max).probability(final_state, t);
}

}  // namespace quadham

#endif  // QUADHAM_TRANSITION_HPP
