#ifndef QUADHAM_ALGEBRA_HPP
#define QUADHAM_ALGEBRA_HPP

// The four Lie algebras su(2), su(1,1), su(2,1) and su(3) as named generator sets
// with exact half-integer matrix representations.
//
// Every representation here is the image of an oscillator map
//     Q(M) = sum_ij psi_i^dag (eta M)_ij psi_j
// for a vector psi of annihilation operators (or creation operators, for the modes
// carrying metric -1). Q is a Lie algebra homomorphism, so products of exponentials
// in the small matrices transfer exactly to the bosonic Fock space.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"
#include "types.hpp"

namespace quadham {

enum class GroupId { SU2, SU11, SU21, SU3 };

inline std::string to_string(GroupId g) {
  switch (g) {
    case GroupId::SU2: return "SU2";
    case GroupId::SU11: return "SU11";
    case GroupId::SU21: return "SU21";
    case GroupId::SU3: return "SU3";
  }
  return "?";
}

// Square matrix (dimension <= 3) of exact rationals.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  explicit RationalMatrix(std::size_t dim) : dim_(dim) {
    if (dim == 0 || dim > 3) throw structure_error("RationalMatrix: dimension must be 1..3");
  }
  RationalMatrix(std::size_t dim, std::initializer_list<Rational> row_major) : RationalMatrix(dim) {
    if (row_major.size() != dim * dim) throw structure_error("RationalMatrix: wrong entry count");
    std::copy(row_major.begin(), row_major.end(), data_.begin());
  }

  static RationalMatrix unit(std::size_t dim, std::size_t i, std::size_t j, Rational v = 1) {
    RationalMatrix m(dim);
    m(i, j) = v;
    return m;
  }
  static RationalMatrix diag(std::initializer_list<Rational> d) {
    RationalMatrix m(d.size());
    std::size_t i = 0;
    for (const auto& x : d) {
      m(i, i) = x;
      ++i;
    }
    return m;
  }

  std::size_t dim() const { return dim_; }
  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.begin() + dim_ * dim_, [](const Rational& r) { return r.is_zero(); });
  }
  bool is_diagonal() const {
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        if (i != j && !(*this)(i, j).is_zero()) return false;
    return true;
  }

  CMatrix to_complex() const {
    CMatrix m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j).to_double();
    return m;
  }

  friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
    check_same(a, b);
    RationalMatrix r(a.dim_);
    for (std::size_t k = 0; k < a.dim_ * a.dim_; ++k) r.data_[k] = a.data_[k] + b.data_[k];
    return r;
  }
  friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
    check_same(a, b);
    RationalMatrix r(a.dim_);
    for (std::size_t k = 0; k < a.dim_ * a.dim_; ++k) r.data_[k] = a.data_[k] - b.data_[k];
    return r;
  }
  friend RationalMatrix operator*(const Rational& s, const RationalMatrix& a) {
    RationalMatrix r(a.dim_);
    for (std::size_t k = 0; k < a.dim_ * a.dim_; ++k) r.data_[k] = s * a.data_[k];
    return r;
  }
  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    check_same(a, b);
    RationalMatrix r(a.dim_);
    for (std::size_t i = 0; i < a.dim_; ++i)
      for (std::size_t j = 0; j < a.dim_; ++j) {
        Rational s;
        for (std::size_t k = 0; k < a.dim_; ++k) s += a(i, k) * b(k, j);
        r(i, j) = s;
      }
    return r;
  }
  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.dim_ != b.dim_) return false;
    return std::equal(a.data_.begin(), a.data_.begin() + a.dim_ * a.dim_, b.data_.begin());
  }

 private:
  static void check_same(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.dim_ != b.dim_) throw structure_error("RationalMatrix: dimension mismatch");
  }

  std::size_t dim_ = 0;
  std::array<Rational, 9> data_{};
};

inline RationalMatrix commutator(const RationalMatrix& a, const RationalMatrix& b) { return a * b - b * a; }

struct Generator {
  std::string name;
  RationalMatrix matrix;
};

// One term c * G_k of a structure-constant expansion.
struct StructureTerm {
  std::size_t k;
  Rational coeff;
  friend bool operator==(const StructureTerm& a, const StructureTerm& b) { return a.k == b.k && a.coeff == b.coeff; }
};

// (i, j) with i < j -> expansion of [G_i, G_j]. [G_i, G_i] = 0 and [G_j, G_i] = -[G_i, G_j].
using StructureConstants = std::map<std::pair<std::size_t, std::size_t>, std::vector<StructureTerm>>;

struct GeneratorSet {
  GroupId group;
  std::vector<Generator> generators;
  StructureConstants structure_constants;
  // Linear combinations of generators used as single factors (the mixed diagonal
  // C + 2K - 3F of the su(3) decomposition).
  std::vector<Generator> composites;

  std::size_t dim() const { return generators.empty() ? 0 : generators.front().matrix.dim(); }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < generators.size(); ++i)
      if (generators[i].name == name) return i;
    return std::nullopt;
  }

  const RationalMatrix& matrix(const std::string& name) const {
    for (const auto& g : generators)
      if (g.name == name) return g.matrix;
    for (const auto& g : composites)
      if (g.name == name) return g.matrix;
    throw lookup_error("unknown generator '" + name + "' in " + to_string(group));
  }
};

namespace detail {

inline Rational half(std::int64_t n) { return Rational(n, 2); }

using Table = std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::vector<StructureTerm>>>;

inline StructureConstants to_constants(const Table& t) {
  StructureConstants sc;
  for (const auto& [ij, terms] : t) sc[ij] = terms;
  return sc;
}

// Expansions over the first independent generators (K = F - C is left out for the
// 3x3 algebras). Derived from the bosonic operator realizations.
inline StructureConstants su2_constants() {
  return to_constants({
      {{0, 1}, {{2, Rational(2)}}},   // [J+,J-] = 2 J3
      {{0, 2}, {{0, Rational(-1)}}},  // [J+,J3] = -J+
      {{1, 2}, {{1, Rational(1)}}},   // [J-,J3] = J-
  });
}

inline StructureConstants su11_constants() {
  return to_constants({
      {{0, 1}, {{2, Rational(-2)}}},  // [K+,K-] = -2 K3
      {{0, 2}, {{0, Rational(-1)}}},
      {{1, 2}, {{1, Rational(1)}}},
  });
}

inline StructureConstants su21_constants() {
  return to_constants({
      {{0, 1}, {{2, Rational(2)}}},      {{0, 2}, {{0, Rational(-1)}}},     {{0, 3}, {}},
      {{0, 4}, {{7, Rational(-1)}}},     {{0, 5}, {{0, half(-1)}}},         {{0, 6}, {{3, Rational(1)}}},
      {{0, 7}, {}},                      {{0, 8}, {{0, half(1)}}},          {{1, 2}, {{1, Rational(1)}}},
      {{1, 3}, {{6, Rational(1)}}},      {{1, 4}, {}},                      {{1, 5}, {{1, half(1)}}},
      {{1, 6}, {}},                      {{1, 7}, {{4, Rational(-1)}}},     {{1, 8}, {{1, half(-1)}}},
      {{2, 3}, {{3, half(1)}}},          {{2, 4}, {{4, half(-1)}}},         {{2, 5}, {}},
      {{2, 6}, {{6, half(-1)}}},         {{2, 7}, {{7, half(1)}}},          {{2, 8}, {}},
      {{3, 4}, {{5, Rational(-2)}}},     {{3, 5}, {{3, Rational(-1)}}},     {{3, 6}, {}},
      {{3, 7}, {{0, Rational(-1)}}},     {{3, 8}, {{3, half(-1)}}},         {{4, 5}, {{4, Rational(1)}}},
      {{4, 6}, {{1, Rational(1)}}},      {{4, 7}, {}},                      {{4, 8}, {{4, half(1)}}},
      {{5, 6}, {{6, half(1)}}},          {{5, 7}, {{7, half(-1)}}},         {{5, 8}, {}},
      {{6, 7}, {{2, Rational(2)}, {5, Rational(-2)}}},                      {{6, 8}, {{6, Rational(-1)}}},
      {{7, 8}, {{7, Rational(1)}}},
  });
}

inline StructureConstants su3_constants() {
  return to_constants({
      {{0, 1}, {{2, Rational(2)}}},      {{0, 2}, {{0, Rational(-1)}}},     {{0, 3}, {}},
      {{0, 4}, {{7, Rational(-1)}}},     {{0, 5}, {{0, half(-1)}}},         {{0, 6}, {{3, Rational(1)}}},
      {{0, 7}, {}},                      {{0, 8}, {{0, half(1)}}},          {{1, 2}, {{1, Rational(1)}}},
      {{1, 3}, {{6, Rational(1)}}},      {{1, 4}, {}},                      {{1, 5}, {{1, half(1)}}},
      {{1, 6}, {}},                      {{1, 7}, {{4, Rational(-1)}}},     {{1, 8}, {{1, half(-1)}}},
      {{2, 3}, {{3, half(1)}}},          {{2, 4}, {{4, half(-1)}}},         {{2, 5}, {}},
      {{2, 6}, {{6, half(-1)}}},         {{2, 7}, {{7, half(1)}}},          {{2, 8}, {}},
      {{3, 4}, {{5, Rational(2)}}},      {{3, 5}, {{3, Rational(-1)}}},     {{3, 6}, {}},
      {{3, 7}, {{0, Rational(1)}}},      {{3, 8}, {{3, half(-1)}}},         {{4, 5}, {{4, Rational(1)}}},
      {{4, 6}, {{1, Rational(-1)}}},     {{4, 7}, {}},                      {{4, 8}, {{4, half(1)}}},
      {{5, 6}, {{6, half(1)}}},          {{5, 7}, {{7, half(-1)}}},         {{5, 8}, {}},
      {{6, 7}, {{2, Rational(-2)}, {5, Rational(2)}}},                      {{6, 8}, {{6, Rational(-1)}}},
      {{7, 8}, {{7, Rational(1)}}},
  });
}

}  // namespace detail

// Generator set of one of the four algebras, matrices exactly as in the faithful
// representations (integer and half-integer entries).
inline GeneratorSet generators(GroupId group) {
  using RM = RationalMatrix;
  const auto h = detail::half;
  switch (group) {
    case GroupId::SU2:
      return {group,
              {{"J+", RM::unit(2, 0, 1)}, {"J-", RM::unit(2, 1, 0)}, {"J3", RM::diag({h(1), h(-1)})}},
              detail::su2_constants(),
              {}};
    case GroupId::SU11:
      return {group,
              {{"K+", RM::unit(2, 0, 1)}, {"K-", RM::unit(2, 1, 0, -1)}, {"K3", RM::diag({h(1), h(-1)})}},
              detail::su11_constants(),
              {}};
    case GroupId::SU21:
      // basis (b_v, b_a, b_s^dag), metric diag(1, 1, -1)
      return {group,
              {{"A", RM::unit(3, 0, 1)},
               {"B", RM::unit(3, 1, 0)},
               {"C", RM::diag({h(1), h(-1), 0})},
               {"D", RM::unit(3, 0, 2)},
               {"E", RM::unit(3, 2, 0, -1)},
               {"F", RM::diag({h(1), 0, h(-1)})},
               {"G", RM::unit(3, 1, 2)},
               {"J", RM::unit(3, 2, 1, -1)},
               {"K", RM::diag({0, h(1), h(-1)})}},
              detail::su21_constants(),
              {}};
    case GroupId::SU3: {
      // basis (b, a, c), metric identity
      GeneratorSet s{group,
                     {{"A", RM::unit(3, 0, 1)},
                      {"B", RM::unit(3, 1, 0)},
                      {"C", RM::diag({h(1), h(-1), 0})},
                      {"D", RM::unit(3, 0, 2)},
                      {"E", RM::unit(3, 2, 0)},
                      {"F", RM::diag({h(1), 0, h(-1)})},
                      {"G", RM::unit(3, 1, 2)},
                      {"J", RM::unit(3, 2, 1)},
                      {"K", RM::diag({0, h(1), h(-1)})}},
                     detail::su3_constants(),
                     {}};
      s.composites.push_back({"C+2K-3F", s.matrix("C") + Rational(2) * s.matrix("K") - Rational(3) * s.matrix("F")});
      return s;
    }
  }
  throw lookup_error("unknown group");
}

// Solves m = sum_k c_k G_k exactly over the leading independent generators.
// Returns nullopt when m is outside the span.
inline std::optional<std::vector<StructureTerm>> expand(const GeneratorSet& set, const RationalMatrix& m) {
  const std::size_t d = set.dim();
  if (m.dim() != d) throw structure_error("expand: dimension mismatch");
  const std::size_t rows = d * d;

  // greedy independent subset, in generator order
  std::vector<std::size_t> basis;
  std::vector<std::vector<Rational>> echelon;  // reduced rows of chosen generators (flattened)
  std::vector<std::size_t> pivots;
  auto flatten = [&](const RationalMatrix& x) {
    std::vector<Rational> v(rows);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) v[i * d + j] = x(i, j);
    return v;
  };
  for (std::size_t g = 0; g < set.generators.size(); ++g) {
    auto v = flatten(set.generators[g].matrix);
    for (std::size_t r = 0; r < echelon.size(); ++r) {
      const Rational f = v[pivots[r]];
      if (!f.is_zero())
        for (std::size_t c = 0; c < rows; ++c) v[c] -= f * echelon[r][c];
    }
    auto it = std::find_if(v.begin(), v.end(), [](const Rational& x) { return !x.is_zero(); });
    if (it == v.end()) continue;
    const std::size_t p = static_cast<std::size_t>(it - v.begin());
    const Rational inv = Rational(1) / v[p];
    for (auto& x : v) x = x * inv;
    for (std::size_t r = 0; r < echelon.size(); ++r) {
      const Rational f = echelon[r][p];
      if (!f.is_zero())
        for (std::size_t c = 0; c < rows; ++c) echelon[r][c] -= f * v[c];
    }
    echelon.push_back(std::move(v));
    pivots.push_back(p);
    basis.push_back(g);
  }

  // Solve sum_b c_b flat(G_b) = flat(m) by Gaussian elimination on the d^2 x n system.
  const std::size_t n = basis.size();
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(n + 1));
  for (std::size_t b = 0; b < n; ++b) {
    const auto v = flatten(set.generators[basis[b]].matrix);
    for (std::size_t r = 0; r < rows; ++r) a[r][b] = v[r];
  }
  const auto rhs = flatten(m);
  for (std::size_t r = 0; r < rows; ++r) a[r][n] = rhs[r];

  std::size_t row = 0;
  std::vector<std::size_t> col_pivot_row(n, rows);
  for (std::size_t c = 0; c < n && row < rows; ++c) {
    std::size_t p = row;
    while (p < rows && a[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[row]);
    const Rational inv = Rational(1) / a[row][c];
    for (auto& x : a[row]) x = x * inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || a[r][c].is_zero()) continue;
      const Rational f = a[r][c];
      for (std::size_t k = 0; k <= n; ++k) a[r][k] -= f * a[row][k];
    }
    col_pivot_row[c] = row++;
  }
  for (std::size_t r = row; r < rows; ++r)
    if (!a[r][n].is_zero()) return std::nullopt;

  std::vector<StructureTerm> terms;
  for (std::size_t c = 0; c < n; ++c) {
    if (col_pivot_row[c] == rows) continue;
    const Rational v = a[col_pivot_row[c]][n];
    if (!v.is_zero()) terms.push_back({basis[c], v});
  }
  return terms;
}

// Structure constants computed from the matrices themselves.
inline StructureConstants commutator_table(const GeneratorSet& set) {
  const std::size_t d = set.dim();
  for (const auto& g : set.generators)
    if (g.matrix.dim() != d) throw structure_error("commutator_table: generator '" + g.name + "' has mismatched dimension");
  StructureConstants table;
  for (std::size_t i = 0; i < set.generators.size(); ++i)
    for (std::size_t j = i + 1; j < set.generators.size(); ++j) {
      auto terms = expand(set, commutator(set.generators[i].matrix, set.generators[j].matrix));
      if (!terms) throw structure_error("commutator_table: algebra not closed at [" + set.generators[i].name + "," + set.generators[j].name + "]");
      table[{i, j}] = std::move(*terms);
    }
  return table;
}

// Matrix of sum_k c_k G_k, using generator names.
inline RationalMatrix combination(const GeneratorSet& set, const std::vector<std::pair<std::string, Rational>>& terms) {
  RationalMatrix m(set.dim());
  for (const auto& [name, c] : terms) m = m + c * set.matrix(name);
  return m;
}

// A relation [lhs.first, lhs.second] = sum rhs, as printed alongside each representation.
struct PrintedRelation {
  std::string label;
  std::pair<std::string, std::string> lhs;  // empty lhs.second means "lhs.first == rhs" (a linear identity)
  std::vector<std::pair<std::string, Rational>> rhs;
};

inline std::vector<PrintedRelation> printed_relations(GroupId group) {
  switch (group) {
    case GroupId::SU2:
      return {{"[J3,J+] = J+", {"J3", "J+"}, {{"J+", 1}}},
              {"[J3,J-] = -J-", {"J3", "J-"}, {{"J-", -1}}},
              {"[J+,J-] = 2 J3", {"J+", "J-"}, {{"J3", 2}}}};
    case GroupId::SU11:
      return {{"[K3,K+] = K+", {"K3", "K+"}, {{"K+", 1}}},
              {"[K3,K-] = -K-", {"K3", "K-"}, {{"K-", -1}}},
              {"[K+,K-] = -2 K3", {"K+", "K-"}, {{"K3", -2}}}};
    case GroupId::SU21:
      return {{"[A,B] = 2C", {"A", "B"}, {{"C", 2}}},
              {"[D,E] = -2F", {"D", "E"}, {{"F", -2}}},
              {"[G,J] = -2K", {"G", "J"}, {{"K", -2}}},
              {"F - C = K", {"F", ""}, {{"C", 1}, {"K", 1}}}};
    case GroupId::SU3:
      return {{"[A,B] = 2C", {"A", "B"}, {{"C", 2}}},
              {"[D,E] = 2F", {"D", "E"}, {{"F", 2}}},
              {"[G,J] = 2K", {"G", "J"}, {{"K", 2}}},
              {"[A,G] = D", {"A", "G"}, {{"D", 1}}}};
  }
  return {};
}

inline bool holds(const GeneratorSet& set, const PrintedRelation& r) {
  const RationalMatrix lhs = r.lhs.second.empty() ? set.matrix(r.lhs.first)
                                                  : commutator(set.matrix(r.lhs.first), set.matrix(r.lhs.second));
  return lhs == combination(set, r.rhs);
}

// sum coeffs[g] * matrix(g), converted to complex floating point.
inline CMatrix assemble(const Coefficients& coeffs, const GeneratorSet& set) {
  const auto d = static_cast<Eigen::Index>(set.dim());
  CMatrix m = CMatrix::Zero(d, d);
  for (const auto& [name, c] : coeffs) m += c * set.matrix(name).to_complex();
  return m;
}

inline bool is_diagonal_generator(const GeneratorSet& set, const std::string& name) {
  return set.matrix(name).is_diagonal();
}

}  // namespace quadham

#endif  // QUADHAM_ALGEBRA_HPP
