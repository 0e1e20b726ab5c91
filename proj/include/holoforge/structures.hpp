#pragma once
/**
 * @file structures.hpp
 * @brief The nine groups acting transitively on spheres, their invariant
 * structures (complex/quaternionic structures, the G2 3-form, the Spin(7)
 * 4-form, Clifford generators for Spin(9)) and membership predicates.
 *
 * Coordinate conventions: C^n = R^{2n} with z_j = x_{2j-1} + i x_{2j};
 * H^n = R^{4n} with q_j = x_{4j-3} + i x_{4j-2} + j x_{4j-1} + k x_{4j}.
 * I, J, K act as right multiplication by -i, -j, -k.
 */

#include "holoforge/linalg.hpp"

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace holoforge {

enum class Family { SO, U, SU, Sp, SpU1, SpSp1, G2, Spin7, Spin9 };

inline constexpr std::array<Family, 9> kAllFamilies = {
    Family::SO,   Family::U,     Family::SU, Family::Sp,   Family::SpU1,
    Family::SpSp1, Family::G2, Family::Spin7, Family::Spin9};

inline std::string_view family_token(Family f) {
  switch (f) {
    case Family::SO: return "so";
    case Family::U: return "u";
    case Family::SU: return "su";
    case Family::Sp: return "sp";
    case Family::SpU1: return "spu1";
    case Family::SpSp1: return "spsp1";
    case Family::G2: return "g2";
    case Family::Spin7: return "spin7";
    case Family::Spin9: return "spin9";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view token) {
  for (Family f : kAllFamilies)
    if (family_token(f) == token) return f;
  return std::nullopt;
}

inline bool has_parameter(Family f) {
  return f != Family::G2 && f != Family::Spin7 && f != Family::Spin9;
}

/// One of the nine sphere-transitive groups together with its parameter.
class GroupSpec {
 public:
  /// Throws std::invalid_argument when n is outside the family's range
  /// (U: n >= 2, SU: n >= 3, SpU1/SpSp1: n >= 2, SO/Sp: n >= 1).
  GroupSpec(Family family, int n = 0) : family_(family), n_(has_parameter(family) ? n : 0) {
    int lo = 1;
    switch (family) {
      case Family::U: lo = 2; break;
      case Family::SU: lo = 3; break;
      case Family::SpU1:
      case Family::SpSp1: lo = 2; break;
      default: break;
    }
    if (has_parameter(family) && n_ < lo)
      throw std::invalid_argument(std::string(family_token(family)) + " requires n >= " +
                                  std::to_string(lo));
  }

  Family family() const { return family_; }
  int n() const { return n_; }

  Index ambient_dim() const {
    switch (family_) {
      case Family::SO: return n_;
      case Family::U:
      case Family::SU: return 2 * n_;
      case Family::Sp:
      case Family::SpU1:
      case Family::SpSp1: return 4 * n_;
      case Family::G2: return 7;
      case Family::Spin7: return 8;
      case Family::Spin9: return 16;
    }
    return 0;
  }

  std::string name() const {
    const std::string k = std::to_string(n_);
    switch (family_) {
      case Family::SO: return "SO(" + k + ")";
      case Family::U: return "U(" + k + ")";
      case Family::SU: return "SU(" + k + ")";
      case Family::Sp: return "Sp(" + k + ")";
      case Family::SpU1: return "Sp(" + k + ")U(1)";
      case Family::SpSp1: return "Sp(" + k + ")Sp(1)";
      case Family::G2: return "G2";
      case Family::Spin7: return "Spin(7)";
      case Family::Spin9: return "Spin(9)";
    }
    return "?";
  }

  bool operator==(const GroupSpec&) const = default;

 private:
  Family family_;
  int n_;
};

// ---------------------------------------------------------------------------
// Alternating forms

/// Alternating k-form on R^n stored by its coefficients on increasing index
/// tuples (0-based).
class AlternatingForm {
 public:
  struct Term {
    std::vector<int> indices;
    double coefficient;
  };

  AlternatingForm(Index ambient_dim, int degree) : ambient_dim_(ambient_dim), degree_(degree) {}

  /// Adds c * e^{i1...ik} for 1-based strictly increasing indices.
  AlternatingForm& add(std::initializer_list<int> one_based, double c) {
    std::vector<int> idx;
    for (int i : one_based) idx.push_back(i - 1);
    if (static_cast<int>(idx.size()) != degree_)
      throw std::invalid_argument("AlternatingForm: wrong number of indices");
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < 0 || idx[k] >= ambient_dim_)
        throw std::invalid_argument("AlternatingForm: index out of range");
      if (k > 0 && idx[k] <= idx[k - 1])
        throw std::invalid_argument("AlternatingForm: indices must be strictly increasing");
    }
    terms_.push_back({std::move(idx), c});
    return *this;
  }

  Index ambient_dim() const { return ambient_dim_; }
  int degree() const { return degree_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::vector<Term>& terms() { return terms_; }

  /// omega(v_1, ..., v_k) as a sum of coefficient-weighted minors.
  double evaluate(std::span<const Vector> v) const {
    if (static_cast<int>(v.size()) != degree_)
      throw std::invalid_argument("AlternatingForm::evaluate: wrong arity");
    double sum = 0.0;
    Matrix minor(degree_, degree_);
    for (const auto& t : terms_) {
      for (int a = 0; a < degree_; ++a)
        for (int b = 0; b < degree_; ++b) minor(a, b) = v[static_cast<std::size_t>(b)](t.indices[a]);
      sum += t.coefficient * minor.determinant();
    }
    return sum;
  }

  double evaluate(std::initializer_list<Vector> v) const {
    std::vector<Vector> vv(v);
    return evaluate(std::span<const Vector>(vv));
  }

  /// Metric dual of the contraction omega(v_1, ..., v_{k-1}, .).
  Vector contract(std::span<const Vector> v) const {
    if (static_cast<int>(v.size()) != degree_ - 1)
      throw std::invalid_argument("AlternatingForm::contract: wrong arity");
    Vector out = Vector::Zero(ambient_dim_);
    Matrix minor(degree_, degree_);
    // expand along the last slot: omega(..., e_c) picks terms containing c
    for (const auto& t : terms_) {
      for (int slot = 0; slot < degree_; ++slot) {
        // coefficient of e_{t.indices[slot]} in the last argument
        Matrix m(degree_ - 1, degree_ - 1);
        for (int a = 0, ra = 0; a < degree_; ++a) {
          if (a == slot) continue;
          for (int b = 0; b < degree_ - 1; ++b) m(ra, b) = v[static_cast<std::size_t>(b)](t.indices[a]);
          ++ra;
        }
        const double sign = ((degree_ - 1 - slot) % 2 == 0) ? 1.0 : -1.0;
        out(t.indices[slot]) += t.coefficient * sign * (degree_ > 1 ? m.determinant() : 1.0);
      }
    }
    return out;
  }

  /// Values on every increasing tuple of basis vectors, in lexicographic order
  /// of the tuples.
  Vector basis_values() const {
    std::vector<std::vector<int>> tuples = increasing_tuples();
    Vector out = Vector::Zero(static_cast<Index>(tuples.size()));
    for (const auto& t : terms_) {
      auto it = std::lower_bound(tuples.begin(), tuples.end(), t.indices);
      out(it - tuples.begin()) += t.coefficient;
    }
    return out;
  }

  /// Values of the pulled-back form (x -> omega(M x, ...)) on increasing
  /// basis tuples.
  Vector pulled_back_values(const Matrix& m) const {
    std::vector<std::vector<int>> tuples = increasing_tuples();
    Vector out(static_cast<Index>(tuples.size()));
    std::vector<Vector> args(static_cast<std::size_t>(degree_));
    for (std::size_t r = 0; r < tuples.size(); ++r) {
      for (int a = 0; a < degree_; ++a) args[static_cast<std::size_t>(a)] = m.col(tuples[r][a]);
      out(static_cast<Index>(r)) = evaluate(std::span<const Vector>(args));
    }
    return out;
  }

  /// Values of the derivation A.omega = -sum_slots omega(.., A e, ..) on
  /// increasing basis tuples.
  Vector derivation_values(const Matrix& a) const {
    std::vector<std::vector<int>> tuples = increasing_tuples();
    Vector out(static_cast<Index>(tuples.size()));
    std::vector<Vector> args(static_cast<std::size_t>(degree_));
    for (std::size_t r = 0; r < tuples.size(); ++r) {
      double sum = 0.0;
      for (int slot = 0; slot < degree_; ++slot) {
        for (int k = 0; k < degree_; ++k)
          args[static_cast<std::size_t>(k)] =
              (k == slot) ? Vector(a.col(tuples[r][k])) : Vector(Vector::Unit(ambient_dim_, tuples[r][k]));
        sum -= evaluate(std::span<const Vector>(args));
      }
      out(static_cast<Index>(r)) = sum;
    }
    return out;
  }

  std::vector<std::vector<int>> increasing_tuples() const {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
      if (static_cast<int>(cur.size()) == degree_) {
        out.push_back(cur);
        return;
      }
      for (int i = start; i < ambient_dim_; ++i) {
        cur.push_back(i);
        self(self, i + 1);
        cur.pop_back();
      }
    };
    rec(rec, 0);
    return out;
  }

 private:
  Index ambient_dim_;
  int degree_;
  std::vector<Term> terms_;
};

/// phi = e123 + e145 - e167 + e246 + e257 + e347 - e356 on R^7.
inline const AlternatingForm& g2_form() {
  static const AlternatingForm phi = [] {
    AlternatingForm f(7, 3);
    f.add({1, 2, 3}, 1).add({1, 4, 5}, 1).add({1, 6, 7}, -1).add({2, 4, 6}, 1)
        .add({2, 5, 7}, 1).add({3, 4, 7}, 1).add({3, 5, 6}, -1);
    return f;
  }();
  return phi;
}

/// The Spin(7)-invariant 4-form on R^8 (14 terms).
inline const AlternatingForm& spin7_form() {
  static const AlternatingForm theta = [] {
    AlternatingForm f(8, 4);
    f.add({1, 2, 3, 4}, 1).add({1, 2, 5, 6}, 1).add({1, 2, 7, 8}, -1).add({1, 3, 5, 7}, 1)
        .add({1, 3, 6, 8}, 1).add({1, 4, 5, 8}, 1).add({1, 4, 6, 7}, -1).add({5, 6, 7, 8}, 1)
        .add({3, 4, 5, 6}, -1).add({2, 4, 5, 7}, 1).add({2, 3, 5, 8}, -1).add({2, 3, 6, 7}, 1)
        .add({3, 4, 7, 8}, 1).add({2, 4, 6, 8}, 1);
    return f;
  }();
  return theta;
}

/// Phi(x, y) with <Phi(x, y), z> = phi(x, y, z).
inline Vector cross_product(const AlternatingForm& phi, const Vector& x, const Vector& y) {
  if (x.size() != phi.ambient_dim() || y.size() != phi.ambient_dim())
    throw std::invalid_argument("cross_product: dimension mismatch");
  std::array<Vector, 2> args{x, y};
  return phi.contract(args);
}

inline Vector cross_product(const Vector& x, const Vector& y) {
  return cross_product(g2_form(), x, y);
}

/// Theta(x, y, z) with <Theta(x, y, z), w> = theta(x, y, z, w).
inline Vector triple_cross(const AlternatingForm& theta, const Vector& x, const Vector& y,
                           const Vector& z) {
  if (x.size() != theta.ambient_dim() || y.size() != theta.ambient_dim() ||
      z.size() != theta.ambient_dim())
    throw std::invalid_argument("triple_cross: dimension mismatch");
  std::array<Vector, 3> args{x, y, z};
  return theta.contract(args);
}

inline Vector triple_cross(const Vector& x, const Vector& y, const Vector& z) {
  return triple_cross(spin7_form(), x, y, z);
}

/// Cross product on T_base S^7 induced by theta: Theta(base, X, Y).
inline Vector theta_point_cross(const Vector& base, const Vector& x, const Vector& y) {
  if (std::abs(base.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("theta_point_cross: base point must be a unit vector");
  return triple_cross(base, x, y);
}

// ---------------------------------------------------------------------------
// Structure packs

struct NamedOperator {
  std::string name;
  Operator matrix;
};

struct NamedForm {
  std::string name;
  AlternatingForm form;
};

struct StructurePack {
  GroupSpec spec;
  std::vector<NamedOperator> operators;
  std::vector<NamedForm> forms;

  std::vector<Operator> operator_list() const {
    std::vector<Operator> out;
    for (const auto& o : operators) out.push_back(o.matrix);
    return out;
  }

  const Operator& op(std::string_view name) const {
    for (const auto& o : operators)
      if (o.name == name) return o.matrix;
    throw std::out_of_range("StructurePack: no operator " + std::string(name));
  }

  const AlternatingForm& form(std::string_view name) const {
    for (const auto& f : forms)
      if (f.name == name) return f.form;
    throw std::out_of_range("StructurePack: no form " + std::string(name));
  }
};

namespace detail {

inline Operator complex_structure(int n) {
  Operator m = Operator::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    m(2 * j + 1, 2 * j) = 1.0;
    m(2 * j, 2 * j + 1) = -1.0;
  }
  return m;
}

// Right multiplication by -i, -j, -k on H^n, 4x4 blocks on (1, i, j, k).
inline std::array<Operator, 3> quaternionic_structure(int n) {
  Eigen::Matrix4d bi, bj, bk;
  bi << 0, 1, 0, 0,  -1, 0, 0, 0,  0, 0, 0, -1,  0, 0, 1, 0;
  bj << 0, 0, 1, 0,  0, 0, 0, 1,  -1, 0, 0, 0,  0, -1, 0, 0;
  bk << 0, 0, 0, 1,  0, 0, -1, 0,  0, 1, 0, 0,  -1, 0, 0, 0;
  std::array<Operator, 3> out;
  for (auto& m : out) m = Operator::Zero(4 * n, 4 * n);
  for (int q = 0; q < n; ++q) {
    out[0].block(4 * q, 4 * q, 4, 4) = bi;
    out[1].block(4 * q, 4 * q, 4, 4) = bj;
    out[2].block(4 * q, 4 * q, 4, 4) = bk;
  }
  return out;
}

// Nine anticommuting symmetric involutions on R^16, each a 4-fold Kronecker
// product of the real 2x2 matrices 1, X = [[0,1],[1,0]], Z = diag(1,-1) and
// E = [[0,1],[-1,0]] with an even number of E factors.
inline std::array<Operator, 9> clifford_generators() {
  const auto pick = [](char c) {
    Eigen::Matrix2d m;
    switch (c) {
      case 'X': m << 0, 1, 1, 0; break;
      case 'Z': m << 1, 0, 0, -1; break;
      case 'E': m << 0, 1, -1, 0; break;
      default: m.setIdentity(); break;
    }
    return m;
  };
  const auto kron = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  static constexpr std::array<const char*, 9> words = {"111X", "111Z", "11EE", "1EXE", "XEZE",
                                                       "ZEZE", "E1ZE", "EXXE", "EZXE"};
  std::array<Operator, 9> out;
  for (std::size_t a = 0; a < words.size(); ++a) {
    Matrix m = pick(words[a][0]);
    for (int k = 1; k < 4; ++k) m = kron(m, pick(words[a][k]));
    out[a] = m;
  }
  return out;
}

}  // namespace detail

/// Invariant data of a group: structure endomorphisms and/or forms with exact
/// integer entries.
inline StructurePack build_structures(const GroupSpec& spec) {
  StructurePack pack{spec, {}, {}};
  switch (spec.family()) {
    case Family::SO: break;
    case Family::U:
    case Family::SU: pack.operators.push_back({"I", detail::complex_structure(spec.n())}); break;
    case Family::Sp:
    case Family::SpU1:
    case Family::SpSp1: {
      auto ijk = detail::quaternionic_structure(spec.n());
      pack.operators.push_back({"I", ijk[0]});
      pack.operators.push_back({"J", ijk[1]});
      pack.operators.push_back({"K", ijk[2]});
      break;
    }
    case Family::G2: pack.forms.push_back({"phi", g2_form()}); break;
    case Family::Spin7: pack.forms.push_back({"theta", spin7_form()}); break;
    case Family::Spin9: {
      auto gens = detail::clifford_generators();
      for (std::size_t a = 0; a < gens.size(); ++a)
        pack.operators.push_back({"I" + std::to_string(a + 1), gens[a]});
      break;
    }
  }
  return pack;
}

/// Residual of M after orthogonal projection (Frobenius) onto span(basis).
inline double span_residual(const Operator& m, std::span<const Operator> basis) {
  if (basis.empty()) return m.norm();
  Matrix flat(m.size(), static_cast<Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k)
    flat.col(static_cast<Index>(k)) = Eigen::Map<const Vector>(basis[k].data(), basis[k].size());
  SubspaceBasis q = orthonormalize(flat);
  Eigen::Map<const Vector> v(m.data(), m.size());
  return q.residual(v).norm();
}

// ---------------------------------------------------------------------------
// Relation checks

struct RelationCheck {
  std::string name;
  double residual;
  bool passed;
};

/// Defining relations of the pack: exact integer identities for operators
/// and the norm identities of the induced cross products for forms.
inline std::vector<RelationCheck> structure_relations(const StructurePack& pack,
                                                      std::uint64_t seed = 7) {
  std::vector<RelationCheck> out;
  const Index n = pack.spec.ambient_dim();
  const auto exact = [](const Operator& m) { return m.cast<long long>().eval(); };
  const auto max_abs = [](const Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>& m) {
    return m.size() ? static_cast<double>(m.cwiseAbs().maxCoeff()) : 0.0;
  };
  using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
  const IntMatrix id = IntMatrix::Identity(n, n);
  const auto push = [&](std::string name, double r) { out.push_back({std::move(name), r, r == 0.0}); };

  switch (pack.spec.family()) {
    case Family::SO: break;
    case Family::U:
    case Family::SU: {
      IntMatrix i = exact(pack.op("I"));
      push("I^2 = -1", max_abs(i * i + id));
      push("I^T = -I", max_abs(i.transpose() + i));
      break;
    }
    case Family::Sp:
    case Family::SpU1:
    case Family::SpSp1: {
      IntMatrix i = exact(pack.op("I")), j = exact(pack.op("J")), k = exact(pack.op("K"));
      push("I^2 = -1", max_abs(i * i + id));
      push("J^2 = -1", max_abs(j * j + id));
      push("K^2 = -1", max_abs(k * k + id));
      push("IJ = K", max_abs(i * j - k));
      push("JK = I", max_abs(j * k - i));
      push("KI = J", max_abs(k * i - j));
      push("IJ = -JI", max_abs(i * j + j * i));
      push("JK = -KJ", max_abs(j * k + k * j));
      push("KI = -IK", max_abs(k * i + i * k));
      break;
    }
    case Family::Spin9: {
      std::vector<IntMatrix> g;
      for (const auto& o : pack.operators) g.push_back(exact(o.matrix));
      for (std::size_t a = 0; a < g.size(); ++a)
        push("I" + std::to_string(a + 1) + "^2 = 1", max_abs(g[a] * g[a] - id));
      for (std::size_t a = 0; a < g.size(); ++a)
        push("I" + std::to_string(a + 1) + "^T = I" + std::to_string(a + 1),
             max_abs(g[a].transpose() - g[a]));
      for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = a + 1; b < g.size(); ++b)
          push("I" + std::to_string(a + 1) + "I" + std::to_string(b + 1) + " = -I" +
                   std::to_string(b + 1) + "I" + std::to_string(a + 1),
               max_abs(g[a] * g[b] + g[b] * g[a]));
      break;
    }
    case Family::G2:
    case Family::Spin7: {
      const AlternatingForm& f = pack.forms.front().form;
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> gauss;
      const auto rand_vec = [&] {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
        return v;
      };
      double worst = 0.0;
      for (int trial = 0; trial < 20; ++trial) {
        if (f.degree() == 3) {
          Vector x = rand_vec(), y = rand_vec();
          Vector c = cross_product(f, x, y);
          worst = std::max(worst, std::abs(c.squaredNorm() - (x.squaredNorm() * y.squaredNorm() -
                                                              std::pow(x.dot(y), 2))));
        } else {
          Vector x = rand_vec(), y = rand_vec(), z = rand_vec();
          Matrix m(n, 3);
          m << x, y, z;
          Vector c = triple_cross(f, x, y, z);
          worst = std::max(worst, std::abs(c.squaredNorm() - (m.transpose() * m).determinant()));
        }
      }
      const bool cubic = f.degree() == 3;
      out.push_back({cubic ? "|Phi(x,y)|^2 = |x|^2|y|^2 - <x,y>^2"
                           : "|Theta(x,y,z)|^2 = det Gram(x,y,z)",
                     worst, worst < 1e-9});
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Membership

/// Largest violation of the membership conditions for g: orthogonality,
/// det = 1, and the family's structure-preservation condition (g L g^T = L,
/// span preservation by projection residual, form pullback by g^{-1}; for
/// SU additionally |det_C g - 1|).
inline double membership_residual(const StructurePack& pack, const Operator& g) {
  const Index n = pack.spec.ambient_dim();
  if (g.rows() != n || g.cols() != n) throw std::invalid_argument("is_member: dimension mismatch");
  double r = (g.transpose() * g - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  r = std::max(r, std::abs(g.determinant() - 1.0));
  const Matrix gt = g.transpose();

  const auto preserved = [&](const Operator& l) { return (g * l * gt - l).cwiseAbs().maxCoeff(); };
  const auto span_kept = [&](const Operator& l, std::span<const Operator> basis) {
    return span_residual(g * l * gt, basis);
  };

  switch (pack.spec.family()) {
    case Family::SO: break;
    case Family::U: r = std::max(r, preserved(pack.op("I"))); break;
    case Family::SU: {
      r = std::max(r, preserved(pack.op("I")));
      const Index m = n / 2;
      Eigen::MatrixXcd c(m, m);
      for (Index k = 0; k < m; ++k)
        for (Index j = 0; j < m; ++j) c(k, j) = {g(2 * k, 2 * j), g(2 * k + 1, 2 * j)};
      r = std::max(r, std::abs(c.determinant() - std::complex<double>(1.0, 0.0)));
      break;
    }
    case Family::Sp:
      for (const auto& o : pack.operators) r = std::max(r, preserved(o.matrix));
      break;
    case Family::SpU1: {
      r = std::max(r, preserved(pack.op("I")));
      std::array<Operator, 2> jk{pack.op("J"), pack.op("K")};
      r = std::max(r, span_kept(jk[0], jk));
      r = std::max(r, span_kept(jk[1], jk));
      break;
    }
    case Family::SpSp1:
    case Family::Spin9: {
      std::vector<Operator> basis = pack.operator_list();
      for (const auto& l : basis) r = std::max(r, span_kept(l, basis));
      break;
    }
    case Family::G2:
    case Family::Spin7: {
      const AlternatingForm& f = pack.forms.front().form;
      r = std::max(r, (f.pulled_back_values(gt) - f.basis_values()).cwiseAbs().maxCoeff());
      break;
    }
  }
  return r;
}

inline bool is_member(const StructurePack& pack, const Operator& g, double tol = 1e-8) {
  return membership_residual(pack, g) < tol;
}

inline bool is_member(const GroupSpec& spec, const Operator& g, double tol = 1e-8) {
  return is_member(build_structures(spec), g, tol);
}

}  // namespace holoforge
