#include <catch_amalgamated.hpp>

#include <quadham/fock.hpp>

#include <cmath>
#include <numbers>

using namespace quadham;

namespace {

double max_abs(const SparseMatrix& m) {
  double out = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

OperatorExpr jplus() { return OperatorExpr{}.add(1.0, {create(0), annihilate(1)}); }
OperatorExpr jminus() { return OperatorExpr{}.add(1.0, {create(1), annihilate(0)}); }
OperatorExpr j3() { return OperatorExpr{}.add(0.5, {create(0), annihilate(0)}).add(-0.5, {create(1), annihilate(1)}); }
OperatorExpr kplus() { return OperatorExpr{}.add(1.0, {create(0), create(1)}); }
OperatorExpr kminus() { return OperatorExpr{}.add(1.0, {annihilate(0), annihilate(1)}); }

std::vector<bool> interior_rows(const FockBasis& b, int margin) {
  std::vector<bool> rows(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) rows[i] = b.interior(b.state(i), margin);
  return rows;
}

}  // namespace

TEST_CASE("basis enumeration and indexing", "[fock]") {
  const FockBasis b(2, 1);
  REQUIRE(b.size() == 4);
  CHECK(b.state(0) == FockState{0, 0});
  CHECK(b.state(1) == FockState{0, 1});
  CHECK(b.state(2) == FockState{1, 0});
  CHECK(b.state(3) == FockState{1, 1});
  CHECK(FockBasis(3, 2).size() == 27);
}

TEST_CASE("index map round trip is exhaustive", "[fock]") {
  const FockBasis b(2, 60);
  REQUIRE(b.size() == 3721);
  for (std::size_t i = 0; i < b.size(); ++i) REQUIRE(b.index(b.state(i)) == i);
  const FockBasis c(3, 9);
  for (std::size_t i = 0; i < c.size(); ++i) REQUIRE(c.index(c.state(i)) == i);
}

TEST_CASE("basis errors", "[fock]") {
  CHECK_THROWS_AS(FockBasis(3, 1000, 1'000'000), capacity_error);
  CHECK_THROWS_AS(FockBasis(2, 0), capacity_error);
  CHECK_THROWS_AS(FockBasis(4, 2), capacity_error);
  const FockBasis b(2, 3);
  CHECK_THROWS_AS(b.index({4, 0}), index_error);
  CHECK_THROWS_AS(b.index({0, 0, 0}), index_error);
  CHECK_THROWS_AS(b.index({-1, 0}), index_error);
  CHECK_THROWS_AS(b.state(16), index_error);
}

TEST_CASE("number operator is diagonal with integer entries", "[fock]") {
  const FockBasis b(2, 7);
  const SparseMatrix n = operator_matrix(number_operator(0), b);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const cplx v = n.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      CHECK(v == (i == j ? cplx(b.state(i)[0]) : cplx{}));
    }
}

TEST_CASE("ladder matrix elements", "[fock]") {
  const FockBasis b(2, 5);
  const SparseMatrix jp = operator_matrix(jplus(), b);
  // (n_a, n_b) -> (n_a + 1, n_b - 1) with sqrt((n_a + 1) n_b)
  const cplx v = jp.coeff(static_cast<Eigen::Index>(b.index({3, 1})), static_cast<Eigen::Index>(b.index({2, 2})));
  CHECK(std::abs(v - std::sqrt(3.0 * 2.0)) < 1e-15);
  // creation at the cap gives zero
  const SparseMatrix ad = operator_matrix(OperatorExpr{}.add(1.0, {create(0)}), b);
  for (int nb = 0; nb <= 5; ++nb) CHECK(ad.col(static_cast<Eigen::Index>(b.index({5, nb}))).norm() == 0.0);
}

TEST_CASE("[J+, J-] = 2 J3 on every conserved-number block", "[fock]") {
  const FockBasis b(2, 6);
  const SparseMatrix c = operator_matrix(commutator(jplus(), jminus()) - cplx(2.0) * j3(), b);
  // rows with n_a + n_b < n_max are full number blocks, untouched by truncation
  double worst = 0.0;
  for (int k = 0; k < c.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(c, k); it; ++it) {
      const auto s = b.state(static_cast<std::size_t>(it.row()));
      if (s[0] + s[1] < b.n_max()) worst = std::max(worst, std::abs(it.value()));
    }
  CHECK(worst == 0.0);
  // the same identity through floating-point sparse products holds to rounding
  const SparseMatrix jp = operator_matrix(jplus(), b), jm = operator_matrix(jminus(), b);
  const SparseMatrix d = SparseMatrix(jp * jm) - SparseMatrix(jm * jp) - 2.0 * operator_matrix(j3(), b);
  std::vector<bool> rows(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) rows[i] = b.state(i)[0] + b.state(i)[1] < b.n_max();
  double worst_float = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it)
      if (rows[static_cast<std::size_t>(it.row())]) worst_float = std::max(worst_float, std::abs(it.value()));
  CHECK(worst_float < 1e-13);
}

TEST_CASE("[K+, K-] = -(n_a + n_b + 1) on interior rows", "[fock]") {
  const FockBasis b(2, 8);
  const SparseMatrix c = operator_matrix(commutator(kplus(), kminus()) + weighted_number({1.0, 1.0}) + identity_operator(), b);
  const auto rows = interior_rows(b, 1);
  double worst = 0.0;
  for (int k = 0; k < c.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(c, k); it; ++it)
      if (rows[static_cast<std::size_t>(it.row())]) worst = std::max(worst, std::abs(it.value()));
  CHECK(worst == 0.0);
}

TEST_CASE("operator products compose like matrix products", "[fock]") {
  const FockBasis b(2, 6);
  const OperatorExpr x = jplus() + cplx(0.5, 0.25) * kplus(), y = kminus() + j3();
  // away from the truncation edge the intermediate states stay inside the basis
  const CMatrix lhs = CMatrix(operator_matrix(x * y, b));
  const CMatrix rhs = CMatrix(operator_matrix(x, b)) * CMatrix(operator_matrix(y, b));
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.interior(b.state(i), 2))
      CHECK((lhs.row(static_cast<Eigen::Index>(i)) - rhs.row(static_cast<Eigen::Index>(i))).norm() < 1e-13);
}

TEST_CASE("interaction Hamiltonians are exactly Hermitian", "[fock]") {
  const ModelSpec specs[] = {ModelSpec::frequency_converter(0.7, 0.3), ModelSpec::parametric_amplifier(0.4, 1.1),
                             ModelSpec::raman(0.6, 0.4, 0.3, 0.1), ModelSpec::su3(1.0, 0.5, 0.25)};
  for (const auto& s : specs) {
    const FockBasis b(s.n_modes(), s.n_modes() == 2 ? 10 : 4);
    CHECK(hermiticity_defect(operator_matrix(interaction_hamiltonian(s), b)) == 0.0);
    CHECK(hermiticity_defect(operator_matrix(lab_hamiltonian(s, 0.37), b)) == 0.0);
  }
}

TEST_CASE("conserved quantities commute with the interaction Hamiltonian", "[fock]") {
  {
    const FockBasis b(2, 8);
    const auto h = operator_matrix(interaction_hamiltonian(ModelSpec::frequency_converter(0.9, 0.4)), b);
    CHECK(commutator_max_abs(h, operator_matrix(weighted_number({1.0, 1.0}), b)) == 0.0);
  }
  {
    const FockBasis b(3, 5);
    const auto h = operator_matrix(interaction_hamiltonian(ModelSpec::raman(0.8, 0.6, 1.2, 0.4)), b);
    CHECK(commutator_max_abs(h, operator_matrix(weighted_number({1.0, -1.0, 1.0}), b), interior_rows(b, 1)) == 0.0);
  }
}

TEST_CASE("propagators at t = 0 are the identity", "[fock]") {
  const auto spec = ModelSpec::raman(0.5, 0.3, 0.2, 0.1);
  const FockBasis b(3, 3);
  const CMatrix id = CMatrix::Identity(static_cast<Eigen::Index>(b.size()), static_cast<Eigen::Index>(b.size()));
  CHECK((evolve_interaction(reduce(spec), b, 0.0).dense() - id).norm() < 1e-13);
  CHECK((evolve_timedep(spec, b, 0.0, 0.1).dense() - id).norm() == 0.0);
}

TEST_CASE("amplitude of the identity", "[fock]") {
  const FockBasis b(2, 3);
  const BlockUnitary u = block_identity(decompose_sectors(operator_matrix(identity_operator(), b)));
  CHECK(amplitude(u, b, {1, 2}, {1, 2}) == cplx(1.0));
  CHECK(amplitude(u, b, {2, 1}, {1, 2}) == cplx{});
  CHECK_THROWS_AS(amplitude(u, b, {4, 0}, {0, 0}), index_error);
}

TEST_CASE("converter one-photon swap is sin^2(kt) at resonance", "[fock]") {
  const double k = 0.8;
  const auto form = reduce(ModelSpec::frequency_converter(k, 0.0));
  const FockBasis b(2, 4);
  for (const double t : {0.2, 1.0, 2.7}) {
    const auto u = evolve_interaction(form, b, t);
    CHECK(std::abs(std::norm(amplitude(u, b, {0, 1}, {1, 0})) - std::pow(std::sin(k * t), 2)) < 1e-13);
  }
}

TEST_CASE("converter sectors are the total-number blocks", "[fock]") {
  const FockBasis b(2, 5);
  const auto d = decompose_sectors(operator_matrix(interaction_hamiltonian(ModelSpec::frequency_converter(1, 0.2)), b));
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto si = b.state(i), sj = b.state(j);
      CHECK((d.sector_of[i] == d.sector_of[j]) == (si[0] + si[1] == sj[0] + sj[1]));
    }
}

TEST_CASE("amplifier vacuum column is normalized", "[fock]") {
  const FockBasis b(2, 40);
  const auto u = evolve_interaction(reduce(ModelSpec::parametric_amplifier(0.5, 0.3)), b, 1.0);
  double sum = 0.0;
  for (int n = 0; n <= 40; ++n) sum += std::norm(amplitude(u, b, {n, n}, {0, 0}));
  CHECK(std::abs(sum - 1.0) < 1e-12);
  CHECK(unitarity_deficit(u, b) < 1e-8);
}

TEST_CASE("sector propagator matches the full propagator", "[fock]") {
  const auto spec = ModelSpec::parametric_amplifier(0.6, 0.2);
  const FockBasis b(2, 30);
  const auto u = evolve_interaction(reduce(spec), b, 1.4);
  const SectorPropagator sp(realized_hamiltonian(reduce(spec)), b, {0, 0});
  CHECK(sp.size() == 31);
  const CVector psi = sp.evolve(1.4);
  for (int n = 0; n <= 5; ++n) CHECK(std::abs(sp.amplitude({n, n}, psi) - amplitude(u, b, {n, n}, {0, 0})) < 1e-12);
  CHECK(sp.amplitude({1, 0}, psi) == cplx{});
  CHECK(sp.edge_population(psi) < 1e-8);
  CHECK(sp.mean_occupation(0, psi) == Catch::Approx(sp.mean_occupation(1, psi)));
}

TEST_CASE("block cap is enforced", "[fock]") {
  const FockBasis b(2, 30);
  CHECK_THROWS_AS(SpectralPropagator(operator_matrix(interaction_hamiltonian(ModelSpec::parametric_amplifier(1, 0)), b), 10),
                  capacity_error);
  CHECK_THROWS_AS(SectorPropagator(interaction_hamiltonian(ModelSpec::parametric_amplifier(1, 0)), b, {0, 0}, 10),
                  capacity_error);
}

TEST_CASE("time-ordered stepping converges at second order", "[fock]") {
  struct Case {
    ModelSpec spec;
    int n_max;
  };
  const Case cases[] = {{ModelSpec::frequency_converter(1.0, 0.5), 5}, {ModelSpec::raman(0.2, 0.15, 0.1, 0.05), 3}};
  for (const auto& c : cases) {
    INFO(to_string(c.spec.model));
    const FockBasis b(c.spec.n_modes(), c.n_max);
    const auto ref = reference_propagator(c.spec, b, 1.0);
    const double e1 = operator_norm_difference(evolve_timedep(c.spec, b, 1.0, 0.05), ref);
    const double e2 = operator_norm_difference(evolve_timedep(c.spec, b, 1.0, 0.025), ref);
    CHECK(e2 < e1);
    CHECK(std::log2(e1 / e2) == Catch::Approx(2.0).margin(0.1));
  }
}

TEST_CASE("time-ordered stepping rejects bad step sizes", "[fock]") {
  const FockBasis b(2, 3);
  const auto s = ModelSpec::frequency_converter(1, 0);
  CHECK_THROWS_AS(evolve_timedep(s, b, 1.0, 0.3), model_error);
  CHECK_THROWS_AS(evolve_timedep(s, b, 1.0, 0.0), model_error);
  CHECK_THROWS_AS(evolve_timedep(s, FockBasis(3, 2), 1.0, 0.5), index_error);
}

TEST_CASE("amplitudes settle as the truncation grows", "[fock][property]") {
  const auto spec = ModelSpec::parametric_amplifier(0.5, 0.0);
  double prev = 0.0, prev_diff = 1.0;
  for (const int n : {6, 12, 24, 48}) {
    const SectorPropagator sp(interaction_hamiltonian(spec), FockBasis(2, n), {0, 0});
    const double p = std::norm(sp.amplitude({1, 1}, 1.0));
    if (n > 6) {
      const double diff = std::abs(p - prev);
      CHECK(diff <= prev_diff);
      prev_diff = diff;
    }
    prev = p;
  }
  CHECK(prev_diff < 1e-12);
}

TEST_CASE("reference propagator includes unimodular free phases only", "[fock]") {
  const auto spec = ModelSpec::frequency_converter(0.6, 0.4, 3.0, 1.5);
  const FockBasis b(2, 5);
  const auto a = reference_propagator(spec, b, 1.2);
  const auto c = evolve_interaction(reduce(spec), b, 1.2);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) CHECK(std::abs(std::abs(a(i, j)) - std::abs(c(i, j))) < 1e-14);
}

TEST_CASE("sparse helpers", "[fock]") {
  const FockBasis b(2, 4);
  CHECK(max_abs(operator_matrix(OperatorExpr{}, b)) == 0.0);
  CHECK(to_string(FockState{1, 2, 3}) == "(1,2,3)");
}
