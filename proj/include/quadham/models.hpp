#ifndef QUADHAM_MODELS_HPP
#define QUADHAM_MODELS_HPP

// The four quadratic Hamiltonians and their interaction-picture reduction to a
// time-independent generator-coefficient vector. hbar = 1; all frequencies in rad/time.

#include <cmath>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "errors.hpp"
#include "types.hpp"

namespace quadham {

enum class ModelId { FrequencyConverter, ParametricAmplifier, Raman, SU3Hypothetical };

inline std::string to_string(ModelId m) {
  switch (m) {
    case ModelId::FrequencyConverter: return "fc";
    case ModelId::ParametricAmplifier: return "pa";
    case ModelId::Raman: return "raman";
    case ModelId::SU3Hypothetical: return "su3";
  }
  return "?";
}

inline ModelId model_from_string(const std::string& s) {
  if (s == "fc") return ModelId::FrequencyConverter;
  if (s == "pa") return ModelId::ParametricAmplifier;
  if (s == "raman") return ModelId::Raman;
  if (s == "su3") return ModelId::SU3Hypothetical;
  throw model_error("unknown model '" + s + "' (expected fc, pa, raman or su3)");
}

inline GroupId group_of(ModelId m) {
  switch (m) {
    case ModelId::FrequencyConverter: return GroupId::SU2;
    case ModelId::ParametricAmplifier: return GroupId::SU11;
    case ModelId::Raman: return GroupId::SU21;
    case ModelId::SU3Hypothetical: return GroupId::SU3;
  }
  throw model_error("unknown model");
}

// Ket ordering: |n_a, n_b> for the two-mode models, |n_v, n_s, n_a> for Raman,
// |n_a, n_b, n_c> for the su(3) model.
inline std::size_t mode_count(ModelId m) {
  return (m == ModelId::FrequencyConverter || m == ModelId::ParametricAmplifier) ? 2 : 3;
}

struct ModelSpec {
  ModelId model = ModelId::FrequencyConverter;
  // two-mode: omega_a, omega_b; Raman: omega_v, omega_s, omega_a
  double omega_a = 2.0;
  double omega_b = 1.0;
  double omega_v = 1.0;
  double omega_s = 2.0;
  double k = 0.0;      // two-mode coupling
  double delta = 0.0;  // two-mode effective detuning
  double g_s = 0.0, g_a = 0.0, k_s = 0.0, k_a = 0.0;  // Raman couplings and detunings
  double g1 = 0.0, g2 = 0.0, g3 = 0.0;                // su(3) couplings

  static ModelSpec frequency_converter(double k, double delta, double omega_a = 2.0, double omega_b = 1.0) {
    ModelSpec s;
    s.model = ModelId::FrequencyConverter;
    s.k = k;
    s.delta = delta;
    s.omega_a = omega_a;
    s.omega_b = omega_b;
    return s;
  }
  static ModelSpec parametric_amplifier(double k, double delta, double omega_a = 2.0, double omega_b = 1.0) {
    ModelSpec s = frequency_converter(k, delta, omega_a, omega_b);
    s.model = ModelId::ParametricAmplifier;
    return s;
  }
  static ModelSpec raman(double g_s, double g_a, double k_s, double k_a, double omega_v = 1.0, double omega_s = 2.0,
                         double omega_a = 3.0) {
    ModelSpec s;
    s.model = ModelId::Raman;
    s.g_s = g_s;
    s.g_a = g_a;
    s.k_s = k_s;
    s.k_a = k_a;
    s.omega_v = omega_v;
    s.omega_s = omega_s;
    s.omega_a = omega_a;
    return s;
  }
  static ModelSpec su3(double g1, double g2, double g3) {
    ModelSpec s;
    s.model = ModelId::SU3Hypothetical;
    s.g1 = g1;
    s.g2 = g2;
    s.g3 = g3;
    return s;
  }

  std::size_t n_modes() const { return mode_count(model); }
  GroupId group() const { return group_of(model); }

  void validate() const {
    for (double x : {omega_a, omega_b, omega_v, omega_s, k, delta, g_s, g_a, k_s, k_a, g1, g2, g3})
      if (!std::isfinite(x)) throw model_error("model parameters must be finite");
  }
};

// psi_i is a_mode (creation = false) or a_mode^dag (creation = true).
struct OscillatorSlot {
  std::size_t mode;
  bool creation;
};

// Oscillator map Q(M) = sum_ij psi_i^dag (eta M)_ij psi_j realizing a group's matrices
// on a model's Fock space.
struct OscillatorRealization {
  std::vector<OscillatorSlot> slots;
  std::vector<int> metric;
  std::size_t n_modes;
};

inline OscillatorRealization realization(ModelId m) {
  switch (m) {
    case ModelId::FrequencyConverter: return {{{0, false}, {1, false}}, {1, 1}, 2};
    case ModelId::ParametricAmplifier: return {{{0, false}, {1, true}}, {1, -1}, 2};
    case ModelId::Raman: return {{{0, false}, {2, false}, {1, true}}, {1, 1, -1}, 3};  // (b_v, b_a, b_s^dag)
    case ModelId::SU3Hypothetical: return {{{1, false}, {0, false}, {2, false}}, {1, 1, 1}, 3};  // (b, a, c)
  }
  throw model_error("unknown model");
}

// Time-independent interaction picture of a model:
//   U(t) = U_free(t) * e^{t * scalar_rate} * exp(Q(t * sum_g rates[g] G_g))
// up to the unimodular diagonal factor described by free_frequencies and
// conserved_omega (see free_phase).
struct InteractionForm {
  ModelId model;
  GroupId group;
  Coefficients rates;                   // -i times the Hamiltonian coefficient of each generator
  cplx scalar_rate = 0.0;               // -i times the scalar part of the Hamiltonian
  std::vector<double> free_frequencies;  // H_x0 = sum_m free_frequencies[m] n_m
  double conserved_omega = 0.0;          // Raman: I_I = omega (n_v + n_a - n_s), evolved with H_3I + I_I
  std::vector<int> conserved_weights;    // per-mode weights of I_I

  CMatrix rate_matrix() const { return assemble(rates, generators(group)); }
  CMatrix exponent(double t) const { return t * rate_matrix(); }

  // Hamiltonian coefficients h_g with rates = -i h_g.
  Coefficients hamiltonian() const {
    Coefficients h;
    for (const auto& [g, r] : rates) h[g] = I_unit * r;
    return h;
  }
  cplx scalar_energy() const { return I_unit * scalar_rate; }
};

// Interaction-picture reduction.
//   converter: H_I = Delta J3 + k (J+ + J-),       H_x0 = (w_a - Delta/2) n_a + (w_b + Delta/2) n_b
//   amplifier: H_I = Delta K3 - Delta/2 + k (K+ + K-), H_x0 = (w_a - Delta/2) n_a + (w_b - Delta/2) n_b
//   Raman:     H_3I + I_I = 2w F + 2(k_a + w) K - (k_a + 2w) - g_s (D + E) - g_a (A + B),
//              w = (k_s - k_a) / 3, H_30 = w_v n_v + (w_s - k_s) n_s + (w_a - k_a) n_a
//   su(3):     H = i g1 (A - B) + i g3 (D - E) + i g2 (G - J), no free part
inline InteractionForm reduce(const ModelSpec& spec) {
  spec.validate();
  const cplx mi = -I_unit;
  InteractionForm f{spec.model, spec.group(), {}, 0.0, {}, 0.0, {}};
  auto set = [&](const std::string& g, cplx h) { f.rates[g] = mi * h; };
  switch (spec.model) {
    case ModelId::FrequencyConverter:
      set("J3", spec.delta);
      set("J+", spec.k);
      set("J-", spec.k);
      f.free_frequencies = {spec.omega_a - spec.delta / 2, spec.omega_b + spec.delta / 2};
      break;
    case ModelId::ParametricAmplifier:
      set("K3", spec.delta);
      set("K+", spec.k);
      set("K-", spec.k);
      f.scalar_rate = mi * (-spec.delta / 2);
      f.free_frequencies = {spec.omega_a - spec.delta / 2, spec.omega_b - spec.delta / 2};
      break;
    case ModelId::Raman: {
      const double w = (spec.k_s - spec.k_a) / 3.0;
      set("F", 2.0 * w);
      set("K", 2.0 * (spec.k_a + w));
      set("D", -spec.g_s);
      set("E", -spec.g_s);
      set("A", -spec.g_a);
      set("B", -spec.g_a);
      f.scalar_rate = mi * (-(spec.k_a + 2.0 * w));
      f.free_frequencies = {spec.omega_v, spec.omega_s - spec.k_s, spec.omega_a - spec.k_a};
      f.conserved_omega = w;
      f.conserved_weights = {1, -1, 1};
      break;
    }
    case ModelId::SU3Hypothetical:
      set("A", I_unit * spec.g1);
      set("B", -I_unit * spec.g1);
      set("D", I_unit * spec.g3);
      set("E", -I_unit * spec.g3);
      set("G", I_unit * spec.g2);
      set("J", -I_unit * spec.g2);
      f.free_frequencies = {0.0, 0.0, 0.0};
      break;
  }
  return f;
}

// The su(3) matrix [[0, g1, g3], [-g1, 0, g2], [-g3, -g2, 0]] whose exponential (times t)
// is the model's evolution operator on the one-photon sector.
inline CMatrix su3_coupling_matrix(double g1, double g2, double g3) {
  CMatrix m(3, 3);
  m << 0.0, g1, g3, -g1, 0.0, g2, -g3, -g2, 0.0;
  return m;
}

// <m| U_x0(t) e^{+i t I_I} |n>: the part of the propagator left out of the interaction
// exponential. Diagonal in the number basis, so only m == n gives a nonzero (unimodular) value.
struct FreePhase {
  cplx phase;      // the matrix element
  double modulus;  // exactly 1.0 on the diagonal, 0.0 off it
  bool diagonal;   // false flags an off-diagonal request
};

inline FreePhase free_phase(const InteractionForm& form, const std::vector<int>& final_occ,
                            const std::vector<int>& initial_occ, double t) {
  if (final_occ.size() != form.free_frequencies.size() || initial_occ.size() != form.free_frequencies.size())
    throw index_error("free_phase: occupation arity does not match the model");
  if (final_occ != initial_occ) return {0.0, 0.0, false};
  double angle = 0.0;
  for (std::size_t m = 0; m < initial_occ.size(); ++m) angle -= form.free_frequencies[m] * initial_occ[m] * t;
  for (std::size_t m = 0; m < form.conserved_weights.size(); ++m)
    angle += form.conserved_omega * form.conserved_weights[m] * initial_occ[m] * t;
  return {std::polar(1.0, angle), 1.0, true};
}

inline FreePhase free_phase_modulus(const ModelSpec& spec, const std::vector<int>& final_occ,
                                    const std::vector<int>& initial_occ, double t) {
  return free_phase(reduce(spec), final_occ, initial_occ, t);
}

}  // namespace quadham

#endif  // QUADHAM_MODELS_HPP
