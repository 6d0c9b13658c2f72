#ifndef QUADHAM_FOCK_HPP
#define QUADHAM_FOCK_HPP

// Brute-force reference on a truncated multi-mode number basis: ladder-operator matrices,
// Hamiltonians assembled directly from ladder monomials, and exact propagators obtained
// block by block from Hermitian eigendecompositions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "errors.hpp"
#include "models.hpp"
#include "types.hpp"

namespace quadham {

using FockState = std::vector<int>;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr std::size_t kDefaultBasisCap = 20'000'000;
inline constexpr std::size_t kDefaultBlockCap = 4096;

inline std::string to_string(const FockState& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + ")";
}

// All occupation tuples in {0..n_max}^n_modes, indexed row-major (last mode fastest).
class FockBasis {
 public:
  FockBasis(std::size_t n_modes, int n_max, std::size_t cap = kDefaultBasisCap) : n_modes_(n_modes), n_max_(n_max) {
    if (n_modes < 1 || n_modes > 3) throw capacity_error("FockBasis: 1 to 3 modes supported");
    if (n_max < 1) throw capacity_error("FockBasis: n_max must be at least 1");
    double d = 1.0;
    for (std::size_t m = 0; m < n_modes; ++m) d *= n_max + 1.0;
    if (d > static_cast<double>(cap))
      throw capacity_error("FockBasis: " + std::to_string(static_cast<long long>(d)) + " states exceed the cap of " +
                           std::to_string(cap));
    size_ = static_cast<std::size_t>(d);
  }

  std::size_t size() const { return size_; }
  std::size_t n_modes() const { return n_modes_; }
  int n_max() const { return n_max_; }

  bool contains(const FockState& s) const {
    if (s.size() != n_modes_) return false;
    return std::all_of(s.begin(), s.end(), [&](int n) { return n >= 0 && n <= n_max_; });
  }

  std::size_t index(const FockState& s) const {
    if (!contains(s)) throw index_error("state " + to_string(s) + " outside the basis");
    std::size_t i = 0;
    for (int n : s) i = i * static_cast<std::size_t>(n_max_ + 1) + static_cast<std::size_t>(n);
    return i;
  }

  FockState state(std::size_t i) const {
    if (i >= size_) throw index_error("basis index out of range");
    FockState s(n_modes_);
    for (std::size_t m = n_modes_; m-- > 0;) {
      s[m] = static_cast<int>(i % static_cast<std::size_t>(n_max_ + 1));
      i /= static_cast<std::size_t>(n_max_ + 1);
    }
    return s;
  }

  // True when every occupation is at most n_max - margin.
  bool interior(const FockState& s, int margin) const {
    return std::all_of(s.begin(), s.end(), [&](int n) { return n <= n_max_ - margin; });
  }

 private:
  std::size_t n_modes_;
  int n_max_;
  std::size_t size_ = 0;
};

struct LadderOp {
  std::size_t mode;
  bool creation;
};

inline LadderOp create(std::size_t mode) { return {mode, true}; }
inline LadderOp annihilate(std::size_t mode) { return {mode, false}; }

// coeff * ops[0] ops[1] ... ops[k-1]; the rightmost operator acts first.
struct Monomial {
  cplx coeff;
  std::vector<LadderOp> ops;
};

class OperatorExpr {
 public:
  std::vector<Monomial> terms;

  OperatorExpr& add(cplx c, std::vector<LadderOp> ops) {
    if (c != cplx{}) terms.push_back({c, std::move(ops)});
    return *this;
  }

  OperatorExpr& operator+=(const OperatorExpr& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    return *this;
  }
  friend OperatorExpr operator+(OperatorExpr a, const OperatorExpr& b) { return a += b; }
  friend OperatorExpr operator*(cplx c, OperatorExpr a) {
    for (auto& t : a.terms) t.coeff *= c;
    return a;
  }
  friend OperatorExpr operator-(OperatorExpr a, const OperatorExpr& b) { return a += cplx(-1.0) * b; }
  // Operator product: each pair of monomials concatenates, so matrix elements keep a single square root.
  friend OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
    OperatorExpr p;
    for (const auto& x : a.terms)
      for (const auto& y : b.terms) {
        std::vector<LadderOp> ops = x.ops;
        ops.insert(ops.end(), y.ops.begin(), y.ops.end());
        p.add(x.coeff * y.coeff, std::move(ops));
      }
    return p;
  }

  // Calls emit(target, amplitude) for every monomial with a nonzero image of |s>.
  // Raising an occupation beyond n_max gives zero.
  template <typename Emit>
  void apply(const FockState& s, int n_max, Emit&& emit) const {
    FockState work;
    for (const auto& term : terms) {
      work = s;
      // product of the integer ladder factors, one square root at the end (n_a^dag n_a is exact)
      double factor = 1.0;
      bool alive = true;
      for (auto it = term.ops.rbegin(); it != term.ops.rend() && alive; ++it) {
        int& n = work.at(it->mode);
        if (it->creation) {
          if (n >= n_max) alive = false;
          else factor *= ++n;
        } else {
          if (n == 0) alive = false;
          else factor *= n--;
        }
      }
      if (alive) emit(work, term.coeff * std::sqrt(factor));
    }
  }
};

inline OperatorExpr identity_operator(cplx c = 1.0) { return OperatorExpr{}.add(c, {}); }
inline OperatorExpr number_operator(std::size_t mode) {
  return OperatorExpr{}.add(1.0, {create(mode), annihilate(mode)});
}
inline OperatorExpr weighted_number(const std::vector<double>& weights) {
  OperatorExpr e;
  for (std::size_t m = 0; m < weights.size(); ++m) e.add(weights[m], {create(m), annihilate(m)});
  return e;
}

inline SparseMatrix operator_matrix(const OperatorExpr& expr, const FockBasis& basis) {
  std::vector<Eigen::Triplet<cplx>> trip;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    expr.apply(basis.state(j), basis.n_max(), [&](const FockState& target, cplx amp) {
      trip.emplace_back(static_cast<int>(basis.index(target)), static_cast<int>(j), amp);
    });
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.prune(cplx{});
  return m;
}

inline OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b) { return a * b - b * a; }

// Largest entry modulus of [a, b]; restricted to the given rows when rows is non-empty.
inline double commutator_max_abs(const SparseMatrix& a, const SparseMatrix& b, const std::vector<bool>& rows = {}) {
  const SparseMatrix c = SparseMatrix(a * b) - SparseMatrix(b * a);
  double out = 0.0;
  for (int k = 0; k < c.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(c, k); it; ++it)
      if (rows.empty() || rows[static_cast<std::size_t>(it.row())]) out = std::max(out, std::abs(it.value()));
  return out;
}

inline double hermiticity_defect(const SparseMatrix& h) {
  const SparseMatrix d = h - SparseMatrix(h.adjoint());
  double out = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

// Q(M) = sum_ij psi_i^dag (eta M)_ij psi_j on the model's modes, every term normal ordered
// (so a conjugated slot contributes psi_i^dag psi_i = a a^dag = a^dag a + 1).
inline OperatorExpr realize(const CMatrix& m, ModelId model) {
  const OscillatorRealization r = realization(model);
  const auto d = static_cast<Eigen::Index>(r.slots.size());
  if (m.rows() != d || m.cols() != d) throw structure_error("realize: matrix does not match the realization");
  OperatorExpr e;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const cplx c = static_cast<double>(r.metric[static_cast<std::size_t>(i)]) * m(i, j);
      if (c == cplx{}) continue;
      const OscillatorSlot si = r.slots[static_cast<std::size_t>(i)];
      const OscillatorSlot sj = r.slots[static_cast<std::size_t>(j)];
      if (!si.creation && !sj.creation) e.add(c, {create(si.mode), annihilate(sj.mode)});
      else if (!si.creation && sj.creation) e.add(c, {create(si.mode), create(sj.mode)});
      else if (si.creation && !sj.creation) e.add(c, {annihilate(si.mode), annihilate(sj.mode)});
      else {
        e.add(c, {create(sj.mode), annihilate(si.mode)});
        if (si.mode == sj.mode) e.add(c, {});
      }
    }
  return e;
}

// The Hamiltonian whose propagator the interaction form describes, i exp generator included:
// sum_g h_g Q(G_g) + scalar energy. For Raman this is H_3I + I_I.
inline OperatorExpr realized_hamiltonian(const InteractionForm& form) {
  return realize(assemble(form.hamiltonian(), generators(form.group)), form.model) +
         identity_operator(form.scalar_energy());
}

// omega * sum_m w_m n_m (zero operator when the model has no such shift).
inline OperatorExpr conserved_operator(const InteractionForm& form) {
  std::vector<double> w(form.conserved_weights.size());
  for (std::size_t m = 0; m < w.size(); ++m) w[m] = form.conserved_omega * form.conserved_weights[m];
  return weighted_number(w);
}

// Interaction Hamiltonian written directly in ladder operators from the model parameters.
//   converter   (a=0, b=1):       Delta/2 (n_a - n_b) + k (a^dag b + a b^dag)
//   amplifier   (a=0, b=1):       Delta/2 (n_a + n_b) + k (a^dag b^dag + a b)
//   Raman       (v=0, s=1, a=2):  k_s n_s + k_a n_a - g_s (v^dag s^dag + v s) - g_a (v^dag a + a^dag v)
//   su(3) model (a=0, b=1, c=2):  i g1 (b^dag a - a^dag b) + i g3 (b^dag c - c^dag b) + i g2 (a^dag c - c^dag a)
inline OperatorExpr interaction_hamiltonian(const ModelSpec& spec) {
  spec.validate();
  OperatorExpr h;
  const cplx i = I_unit;
  switch (spec.model) {
    case ModelId::FrequencyConverter:
      h.add(spec.delta / 2, {create(0), annihilate(0)}).add(-spec.delta / 2, {create(1), annihilate(1)});
      h.add(spec.k, {create(0), annihilate(1)}).add(spec.k, {create(1), annihilate(0)});
      break;
    case ModelId::ParametricAmplifier:
      h.add(spec.delta / 2, {create(0), annihilate(0)}).add(spec.delta / 2, {create(1), annihilate(1)});
      h.add(spec.k, {create(0), create(1)}).add(spec.k, {annihilate(0), annihilate(1)});
      break;
    case ModelId::Raman:
      h.add(spec.k_s, {create(1), annihilate(1)}).add(spec.k_a, {create(2), annihilate(2)});
      h.add(-spec.g_s, {create(0), create(1)}).add(-spec.g_s, {annihilate(0), annihilate(1)});
      h.add(-spec.g_a, {create(0), annihilate(2)}).add(-spec.g_a, {create(2), annihilate(0)});
      break;
    case ModelId::SU3Hypothetical:
      h.add(i * spec.g1, {create(1), annihilate(0)}).add(-i * spec.g1, {create(0), annihilate(1)});
      h.add(i * spec.g3, {create(1), annihilate(2)}).add(-i * spec.g3, {create(2), annihilate(1)});
      h.add(i * spec.g2, {create(0), annihilate(2)}).add(-i * spec.g2, {create(2), annihilate(0)});
      break;
  }
  return h;
}

// Explicitly time-dependent laboratory Hamiltonian.
//   converter: w_a n_a + w_b n_b + k (e^{-i nu t} a^dag b + h.c.),          nu = w_a - w_b - Delta
//   amplifier: w_a n_a + w_b n_b + k (e^{-i nu t} a^dag b^dag + h.c.),     nu = w_a + w_b - Delta
//   Raman:     sum w_m n_m - g_s (e^{-i nu_s t} v^dag s^dag + h.c.) - g_a (e^{-i nu_a t} v^dag a + h.c.),
//              nu_s = w_v + w_s - k_s, nu_a = w_v - w_a + k_a
//   su(3) model: time independent, equal to its interaction Hamiltonian.
inline OperatorExpr lab_hamiltonian(const ModelSpec& spec, double t) {
  spec.validate();
  OperatorExpr h;
  switch (spec.model) {
    case ModelId::FrequencyConverter: {
      const cplx p = std::polar(1.0, -(spec.omega_a - spec.omega_b - spec.delta) * t);
      h.add(spec.omega_a, {create(0), annihilate(0)}).add(spec.omega_b, {create(1), annihilate(1)});
      h.add(spec.k * p, {create(0), annihilate(1)}).add(spec.k * std::conj(p), {create(1), annihilate(0)});
      break;
    }
    case ModelId::ParametricAmplifier: {
      const cplx p = std::polar(1.0, -(spec.omega_a + spec.omega_b - spec.delta) * t);
      h.add(spec.omega_a, {create(0), annihilate(0)}).add(spec.omega_b, {create(1), annihilate(1)});
      h.add(spec.k * p, {create(0), create(1)}).add(spec.k * std::conj(p), {annihilate(0), annihilate(1)});
      break;
    }
    case ModelId::Raman: {
      const cplx ps = std::polar(1.0, -(spec.omega_v + spec.omega_s - spec.k_s) * t);
      const cplx pa = std::polar(1.0, -(spec.omega_v - spec.omega_a + spec.k_a) * t);
      h.add(spec.omega_v, {create(0), annihilate(0)})
          .add(spec.omega_s, {create(1), annihilate(1)})
          .add(spec.omega_a, {create(2), annihilate(2)});
      h.add(-spec.g_s * ps, {create(0), create(1)}).add(-spec.g_s * std::conj(ps), {annihilate(0), annihilate(1)});
      h.add(-spec.g_a * pa, {create(0), annihilate(2)}).add(-spec.g_a * std::conj(pa), {create(2), annihilate(0)});
      break;
    }
    case ModelId::SU3Hypothetical: return interaction_hamiltonian(spec);
  }
  return h;
}

// Connected components of the off-diagonal pattern of a square sparse matrix.
struct SectorDecomposition {
  std::vector<std::vector<std::size_t>> sectors;  // basis indices, ascending
  std::vector<std::size_t> sector_of;
  std::vector<std::size_t> local_index;

  bool operator==(const SectorDecomposition& o) const { return sectors == o.sectors; }
};

inline SectorDecomposition decompose_sectors(const SparseMatrix& h) {
  const auto n = static_cast<std::size_t>(h.rows());
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int k = 0; k < h.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(h, k); it; ++it) {
      if (it.value() == cplx{}) continue;
      const std::size_t a = find(static_cast<std::size_t>(it.row())), b = find(static_cast<std::size_t>(it.col()));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  SectorDecomposition d;
  d.sector_of.assign(n, 0);
  d.local_index.assign(n, 0);
  std::unordered_map<std::size_t, std::size_t> root_to_sector;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    auto [it, fresh] = root_to_sector.try_emplace(r, d.sectors.size());
    if (fresh) d.sectors.emplace_back();
    d.sector_of[i] = it->second;
    d.local_index[i] = d.sectors[it->second].size();
    d.sectors[it->second].push_back(i);
  }
  return d;
}

inline CMatrix sector_block(const SparseMatrix& h, const std::vector<std::size_t>& states,
                            const SectorDecomposition& d) {
  const auto n = static_cast<Eigen::Index>(states.size());
  CMatrix b = CMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (SparseMatrix::InnerIterator it(h, static_cast<Eigen::Index>(states[static_cast<std::size_t>(j)])); it; ++it)
      b(static_cast<Eigen::Index>(d.local_index[static_cast<std::size_t>(it.row())]), j) = it.value();
  return b;
}

// Spectral data of a Hermitian block; real symmetric blocks use the real solver.
struct HermitianSpectrum {
  Eigen::VectorXd values;
  CMatrix vectors;

  CMatrix propagator(double t) const {
    const Eigen::VectorXcd ph = (values.cast<cplx>() * cplx(0.0, -t)).array().exp();
    return vectors * ph.asDiagonal() * vectors.adjoint();
  }
  CVector evolve(const CVector& psi, double t) const {
    const Eigen::VectorXcd ph = (values.cast<cplx>() * cplx(0.0, -t)).array().exp();
    return vectors * (ph.asDiagonal() * (vectors.adjoint() * psi));
  }
};

inline HermitianSpectrum hermitian_spectrum(const CMatrix& h) {
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
    if (es.info() != Eigen::Success) throw singularity_error("hermitian_spectrum: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors().cast<cplx>()};
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw singularity_error("hermitian_spectrum: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Block-diagonal unitary over a sector decomposition of the basis.
struct BlockUnitary {
  SectorDecomposition layout;
  std::vector<CMatrix> blocks;

  std::size_t dim() const { return layout.sector_of.size(); }

  cplx operator()(std::size_t row, std::size_t col) const {
    const std::size_t s = layout.sector_of.at(col);
    if (layout.sector_of.at(row) != s) return 0.0;
    return blocks[s](static_cast<Eigen::Index>(layout.local_index[row]),
                     static_cast<Eigen::Index>(layout.local_index[col]));
  }

  CMatrix dense() const {
    const auto n = static_cast<Eigen::Index>(dim());
    CMatrix u = CMatrix::Zero(n, n);
    for (std::size_t s = 0; s < blocks.size(); ++s) {
      const auto& st = layout.sectors[s];
      for (std::size_t j = 0; j < st.size(); ++j)
        for (std::size_t i = 0; i < st.size(); ++i)
          u(static_cast<Eigen::Index>(st[i]), static_cast<Eigen::Index>(st[j])) =
              blocks[s](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return u;
  }

  // diag(phases) * U
  void scale_rows(const std::vector<cplx>& phases) {
    for (std::size_t s = 0; s < blocks.size(); ++s)
      for (std::size_t i = 0; i < layout.sectors[s].size(); ++i)
        blocks[s].row(static_cast<Eigen::Index>(i)) *= phases.at(layout.sectors[s][i]);
  }
};

inline BlockUnitary block_identity(const SectorDecomposition& d) {
  BlockUnitary u{d, {}};
  for (const auto& s : d.sectors) {
    const auto n = static_cast<Eigen::Index>(s.size());
    u.blocks.push_back(CMatrix::Identity(n, n));
  }
  return u;
}

namespace detail {
inline void require_block_cap(const SectorDecomposition& d, std::size_t cap) {
  for (const auto& s : d.sectors)
    if (s.size() > cap)
      throw capacity_error("sector of dimension " + std::to_string(s.size()) + " exceeds the dense cap " +
                           std::to_string(cap));
}
}  // namespace detail

// e^{-i H t} for a Hermitian sparse H, from one eigendecomposition per sector.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const SparseMatrix& h, std::size_t block_cap = kDefaultBlockCap)
      : layout_(decompose_sectors(h)) {
    detail::require_block_cap(layout_, block_cap);
    for (const auto& s : layout_.sectors) spectra_.push_back(hermitian_spectrum(sector_block(h, s, layout_)));
  }

  BlockUnitary at(double t) const {
    BlockUnitary u{layout_, {}};
    u.blocks.reserve(spectra_.size());
    for (const auto& sp : spectra_) u.blocks.push_back(sp.propagator(t));
    return u;
  }
  const SectorDecomposition& layout() const { return layout_; }

 private:
  SectorDecomposition layout_;
  std::vector<HermitianSpectrum> spectra_;
};

inline BlockUnitary evolve_interaction(const InteractionForm& form, const FockBasis& basis, double t,
                                       std::size_t block_cap = kDefaultBlockCap) {
  if (basis.n_modes() != mode_count(form.model)) throw index_error("evolve_interaction: basis arity mismatch");
  return SpectralPropagator(operator_matrix(realized_hamiltonian(form), basis), block_cap).at(t);
}

// Exact U_x0(t) U_xI(t): free and shift phases times the interaction propagator.
inline BlockUnitary reference_propagator(const ModelSpec& spec, const FockBasis& basis, double t,
                                         std::size_t block_cap = kDefaultBlockCap) {
  const InteractionForm form = reduce(spec);
  BlockUnitary u = evolve_interaction(form, basis, t, block_cap);
  std::vector<cplx> phases(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const FockState s = basis.state(i);
    phases[i] = free_phase(form, s, s, t).phase;
  }
  u.scale_rows(phases);
  return u;
}

// Time-ordered product of midpoint exponentials exp(-i H(t_k + dt/2) dt) of the laboratory
// Hamiltonian. Requires t / dt to be an integer.
inline BlockUnitary evolve_timedep(const ModelSpec& spec, const FockBasis& basis, double t, double dt,
                                   std::size_t block_cap = kDefaultBlockCap) {
  if (!(dt > 0.0)) throw model_error("evolve_timedep: dt must be positive");
  if (t < 0.0) throw model_error("evolve_timedep: t must be nonnegative");
  const double steps_real = t / dt;
  const auto steps = static_cast<long>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9 * std::max(1.0, steps_real))
    throw model_error("evolve_timedep: t / dt must be an integer");
  if (basis.n_modes() != spec.n_modes()) throw index_error("evolve_timedep: basis arity mismatch");
  const SectorDecomposition layout = decompose_sectors(operator_matrix(lab_hamiltonian(spec, 0.0), basis));
  detail::require_block_cap(layout, block_cap);
  BlockUnitary u = block_identity(layout);
  for (long k = 0; k < steps; ++k) {
    const SparseMatrix h = operator_matrix(lab_hamiltonian(spec, (static_cast<double>(k) + 0.5) * dt), basis);
    for (std::size_t s = 0; s < layout.sectors.size(); ++s)
      u.blocks[s] = hermitian_spectrum(sector_block(h, layout.sectors[s], layout)).propagator(dt) * u.blocks[s];
  }
  return u;
}

inline cplx amplitude(const BlockUnitary& u, const FockBasis& basis, const FockState& final_state,
                      const FockState& initial_state) {
  return u(basis.index(final_state), basis.index(initial_state));
}

// Spectral norm of a - b, block by block when both share a layout.
inline double operator_norm_difference(const BlockUnitary& a, const BlockUnitary& b) {
  if (a.dim() != b.dim()) throw structure_error("operator_norm_difference: dimension mismatch");
  auto norm2 = [](const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
  };
  if (a.layout == b.layout) {
    double out = 0.0;
    for (std::size_t s = 0; s < a.blocks.size(); ++s) out = std::max(out, norm2(a.blocks[s] - b.blocks[s]));
    return out;
  }
  if (a.dim() > kDefaultBlockCap) throw capacity_error("operator_norm_difference: layouts differ and basis too large");
  return norm2(a.dense() - b.dense());
}

// Frobenius norm of (U^dag U - I) over the columns of interior states.
inline double unitarity_deficit(const BlockUnitary& u, const FockBasis& basis, int margin = 2) {
  double acc = 0.0;
  for (std::size_t s = 0; s < u.blocks.size(); ++s) {
    const CMatrix g = u.blocks[s].adjoint() * u.blocks[s] - CMatrix::Identity(u.blocks[s].rows(), u.blocks[s].cols());
    for (std::size_t j = 0; j < u.layout.sectors[s].size(); ++j)
      if (basis.interior(basis.state(u.layout.sectors[s][j]), margin))
        acc += g.col(static_cast<Eigen::Index>(j)).squaredNorm();
  }
  return std::sqrt(acc);
}

// Evolution of one initial state inside its own sector, found by breadth-first search over
// the Hamiltonian's action; the full basis matrix is never formed.
class SectorPropagator {
 public:
  SectorPropagator(const OperatorExpr& h, const FockBasis& basis, const FockState& initial,
                   std::size_t block_cap = kDefaultBlockCap)
      : basis_(basis), n_max_(basis.n_max()) {
    std::unordered_map<std::size_t, std::size_t> local;
    std::vector<Eigen::Triplet<cplx>> trip;
    std::deque<std::size_t> queue;
    auto visit = [&](const FockState& s) {
      const std::size_t idx = basis.index(s);
      auto [it, fresh] = local.try_emplace(idx, states_.size());
      if (fresh) {
        if (states_.size() >= block_cap)
          throw capacity_error("sector of " + to_string(initial) + " exceeds the dense cap " + std::to_string(block_cap));
        states_.push_back(s);
        queue.push_back(it->second);
      }
      return it->second;
    };
    visit(initial);
    while (!queue.empty()) {
      const std::size_t j = queue.front();
      queue.pop_front();
      const FockState s = states_[j];
      h.apply(s, n_max_, [&](const FockState& target, cplx amp) {
        trip.emplace_back(static_cast<int>(visit(target)), static_cast<int>(j), amp);
      });
    }
    const auto n = static_cast<Eigen::Index>(states_.size());
    SparseMatrix m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    spectrum_ = hermitian_spectrum(CMatrix(m));
    local_ = std::move(local);
  }

  const std::vector<FockState>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }

  // Amplitudes over states(), starting from the initial state.
  CVector evolve(double t) const {
    CVector e0 = CVector::Zero(static_cast<Eigen::Index>(states_.size()));
    e0(0) = 1.0;
    return spectrum_.evolve(e0, t);
  }

  // Zero for states outside the sector (they are unreachable).
  cplx amplitude(const FockState& final_state, const CVector& psi) const {
    const auto it = local_.find(basis_.index(final_state));
    return it == local_.end() ? cplx{} : psi(static_cast<Eigen::Index>(it->second));
  }
  cplx amplitude(const FockState& final_state, double t) const { return amplitude(final_state, evolve(t)); }

  double mean_occupation(std::size_t mode, const CVector& psi) const {
    double m = 0.0;
    for (std::size_t i = 0; i < states_.size(); ++i) m += std::norm(psi(static_cast<Eigen::Index>(i))) * states_[i].at(mode);
    return m;
  }

  // Population of states with some occupation above n_max - margin.
  double edge_population(const CVector& psi, int margin = 2) const {
    double p = 0.0;
    for (std::size_t i = 0; i < states_.size(); ++i)
      if (std::any_of(states_[i].begin(), states_[i].end(), [&](int n) { return n > n_max_ - margin; }))
        p += std::norm(psi(static_cast<Eigen::Index>(i)));
    return p;
  }

 private:
  FockBasis basis_;
  int n_max_;
  std::vector<FockState> states_;
  std::unordered_map<std::size_t, std::size_t> local_;
  HermitianSpectrum spectrum_;
};

}  // namespace quadham

#endif  // QUADHAM_FOCK_HPP
