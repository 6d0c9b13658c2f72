#include <catch_amalgamated.hpp>

#include <quadham/fock.hpp>
#include <quadham/models.hpp>
#include <quadham/smallmat.hpp>

#include <cmath>

using namespace quadham;

namespace {

cplx rate(const InteractionForm& f, const std::string& g) {
  const auto it = f.rates.find(g);
  return it == f.rates.end() ? cplx{} : it->second;
}

double operator_distance(const OperatorExpr& a, const OperatorExpr& b, const FockBasis& basis) {
  const SparseMatrix d = operator_matrix(a, basis) - operator_matrix(b, basis);
  double out = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

ModelSpec sample(ModelId m) {
  switch (m) {
    case ModelId::FrequencyConverter: return ModelSpec::frequency_converter(0.7, 0.3);
    case ModelId::ParametricAmplifier: return ModelSpec::parametric_amplifier(0.4, 1.1);
    case ModelId::Raman: return ModelSpec::raman(0.6, 0.4, 0.3, 0.1);
    case ModelId::SU3Hypothetical: return ModelSpec::su3(1.0, 0.5, 0.25);
  }
  return {};
}

const ModelId kModels[] = {ModelId::FrequencyConverter, ModelId::ParametricAmplifier, ModelId::Raman,
                           ModelId::SU3Hypothetical};

}  // namespace

TEST_CASE("converter reduction at resonance", "[models]") {
  const auto f = reduce(ModelSpec::frequency_converter(1.0, 0.0));
  CHECK(f.group == GroupId::SU2);
  CHECK(rate(f, "J+") == -I_unit);
  CHECK(rate(f, "J-") == -I_unit);
  CHECK(rate(f, "J3") == cplx{});
}

TEST_CASE("uncoupled amplifier is pure diagonal evolution", "[models]") {
  const auto spec = ModelSpec::parametric_amplifier(0.0, 0.8);
  const auto f = reduce(spec);
  CHECK(rate(f, "K+") == cplx{});
  CHECK(rate(f, "K-") == cplx{});
  CHECK(rate(f, "K3") == -I_unit * 0.8);
  const FockBasis basis(2, 6);
  const auto u = reference_propagator(spec, basis, 1.3);
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      if (i != j) CHECK(std::abs(u(i, j)) == 0.0);
}

TEST_CASE("scattering reduction reproduces the coupling matrix", "[models]") {
  const auto f = reduce(ModelSpec::raman(1.0, 1.0, 0.0, 0.0));
  CMatrix expected(3, 3);
  expected << 0, -1, -1, -1, 0, 0, 1, 0, 0;  // Hamiltonian matrix, basis (b_v, b_a, b_s^dag)
  CHECK((f.rate_matrix() * I_unit - expected).norm() < 1e-15);
  CHECK(f.conserved_omega == 0.0);
}

TEST_CASE("scattering shift uses one third of the detuning difference", "[models]") {
  const auto f = reduce(ModelSpec::raman(0.5, 0.5, 2.0, 1.0));
  CHECK(f.conserved_omega == Catch::Approx(1.0 / 3.0));
  CHECK(rate(f, "F") == -I_unit * (2.0 / 3.0));
  CHECK(rate(f, "K") == -I_unit * (2.0 * (1.0 + 1.0 / 3.0)));
}

TEST_CASE("su3 reduction is the antisymmetric coupling matrix", "[models]") {
  const auto f = reduce(ModelSpec::su3(0.9, -0.4, 0.3));
  CHECK((f.rate_matrix() - su3_coupling_matrix(0.9, -0.4, 0.3)).norm() < 1e-15);
  // anti-Hermitian, so the exponential is unitary with unit determinant
  CHECK((f.rate_matrix() + f.rate_matrix().adjoint()).norm() < 1e-15);
  CHECK(std::abs(std::abs(expm(f.exponent(2.0)).determinant()) - 1.0) < 1e-13);
}

TEST_CASE("two-mode rate matrices are anti-Hermitian under their metric", "[models][property]") {
  for (const auto m : {ModelId::FrequencyConverter, ModelId::ParametricAmplifier, ModelId::Raman}) {
    const auto f = reduce(sample(m));
    const auto r = realization(m);
    CMatrix eta = CMatrix::Zero(static_cast<Eigen::Index>(r.metric.size()), static_cast<Eigen::Index>(r.metric.size()));
    for (std::size_t i = 0; i < r.metric.size(); ++i) eta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = r.metric[i];
    const CMatrix x = f.rate_matrix();
    CHECK((eta * x + x.adjoint() * eta).norm() < 1e-14);
    CHECK(std::abs(std::abs(expm(x, 1.7).determinant()) - 1.0) < 1e-12);
  }
}

TEST_CASE("reduce is linear in each coupling", "[models][property]") {
  auto rates = [](ModelSpec s) { return reduce(s).rate_matrix(); };
  ModelSpec base = ModelSpec::raman(0.3, 0.2, 0.5, 0.1);
  ModelSpec zero = base;
  zero.g_s = 0.0;
  ModelSpec doubled = base;
  doubled.g_s = 0.6;
  CHECK((rates(doubled) - 2.0 * rates(base) + rates(zero)).norm() < 1e-15);

  const auto a = ModelSpec::frequency_converter(0.5, 0.2), b = ModelSpec::frequency_converter(1.5, 0.2),
             c = ModelSpec::frequency_converter(1.0, 0.2);
  CHECK((rates(a) + rates(b) - 2.0 * rates(c)).norm() < 1e-15);
}

TEST_CASE("reduce rejects non-finite parameters", "[models]") {
  auto s = ModelSpec::frequency_converter(std::nan(""), 0.0);
  CHECK_THROWS_AS(reduce(s), model_error);
  CHECK_THROWS_AS(model_from_string("laser"), model_error);
}

TEST_CASE("free phase is unimodular on the diagonal", "[models]") {
  for (const auto m : kModels) {
    const auto spec = sample(m);
    const std::vector<int> n = mode_count(m) == 2 ? std::vector<int>{3, 1} : std::vector<int>{2, 0, 1};
    for (const double t : {0.0, 0.37, 5.0}) {
      const auto p = free_phase_modulus(spec, n, n, t);
      CHECK(p.diagonal);
      CHECK(p.modulus == 1.0);
      CHECK(std::abs(std::abs(p.phase) - 1.0) < 1e-15);
    }
  }
}

TEST_CASE("free phase flags off-diagonal requests", "[models]") {
  const auto p = free_phase_modulus(sample(ModelId::FrequencyConverter), {1, 0}, {0, 1}, 1.0);
  CHECK_FALSE(p.diagonal);
  CHECK(p.modulus == 0.0);
  CHECK_THROWS_AS(free_phase_modulus(sample(ModelId::FrequencyConverter), {1, 0, 0}, {1, 0, 0}, 1.0), index_error);
}

TEST_CASE("scattering constant of motion commutes with the interaction Hamiltonian", "[models]") {
  const auto spec = ModelSpec::raman(0.8, 0.6, 1.2, 0.4);
  const auto f = reduce(spec);
  const FockBasis basis(3, 5);
  const auto h = operator_matrix(interaction_hamiltonian(spec), basis);
  const auto ii = operator_matrix(conserved_operator(f), basis);
  // truncation only breaks the commutator on the outer shell
  std::vector<bool> rows(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) rows[i] = basis.interior(basis.state(i), 1);
  CHECK(commutator_max_abs(h, ii, rows) < 1e-14);
  // with integer weights the sparse arithmetic is exact
  CHECK(commutator_max_abs(h, operator_matrix(weighted_number({1.0, -1.0, 1.0}), basis), rows) == 0.0);
  // its 3x3 representative is the identity, central in the algebra: Q(1) = n_v + n_a - n_s - 1
  const auto q = operator_matrix(realize(CMatrix::Identity(3, 3), ModelId::Raman), basis);
  const auto expected = operator_matrix(weighted_number({1.0, -1.0, 1.0}) - identity_operator(), basis);
  CHECK(SparseMatrix(q - expected).norm() == 0.0);
}

TEST_CASE("realized interaction form equals the ladder-operator Hamiltonian", "[models][property]") {
  for (const auto m : kModels) {
    INFO(to_string(m));
    const auto spec = sample(m);
    const auto f = reduce(spec);
    const FockBasis basis(mode_count(m), mode_count(m) == 2 ? 8 : 4);
    CHECK(operator_distance(realized_hamiltonian(f) - conserved_operator(f), interaction_hamiltonian(spec), basis) < 1e-14);
  }
}

TEST_CASE("constant-of-motion insertion leaves probabilities unchanged", "[models][property]") {
  const auto spec = ModelSpec::raman(0.7, 0.5, 1.5, 0.2);
  const auto f = reduce(spec);
  const FockBasis basis(3, 4);
  const double t = 1.3;
  // without the shift: exp(-i t H_3I); with it: exp(-i t (H_3I + I_I))
  const SpectralPropagator plain(operator_matrix(interaction_hamiltonian(spec), basis));
  const SpectralPropagator shifted(operator_matrix(realized_hamiltonian(f), basis));
  const auto a = plain.at(t), b = shifted.at(t);
  double worst = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (!basis.interior(basis.state(i), 2)) continue;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (!basis.interior(basis.state(j), 2)) continue;
      worst = std::max(worst, std::abs(std::norm(a(i, j)) - std::norm(b(i, j))));
    }
  }
  CHECK(worst < 1e-12);
}
