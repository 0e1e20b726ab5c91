#pragma once
/**
 * @file liealg.hpp
 * @brief Lie algebras of the sphere-transitive groups as subalgebras of
 * so(n), computed as nullspaces of linearised structure-preservation
 * conditions, and their pointwise/setwise stabilizers of subspaces.
 */

#include "holoforge/linalg.hpp"
#include "holoforge/structures.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <functional>

namespace holoforge {

/// Frobenius-orthonormal basis of a subalgebra of so(n).
struct AlgebraBasis {
  Index ambient_dim = 0;
  std::vector<Operator> elements;

  Index dim() const { return static_cast<Index>(elements.size()); }

  /// sum_k c_k A_k
  Operator combine(const Vector& c) const {
    Operator out = Operator::Zero(ambient_dim, ambient_dim);
    for (Index k = 0; k < dim(); ++k) out += c(k) * elements[static_cast<std::size_t>(k)];
    return out;
  }
};

namespace detail {

/// (e_i e_j^T - e_j e_i^T) / sqrt(2), i < j, in lexicographic order.
inline std::vector<Operator> antisymmetric_unit_basis(Index n) {
  std::vector<Operator> out;
  out.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      Operator e = Operator::Zero(n, n);
      e(i, j) = M_SQRT1_2;
      e(j, i) = -M_SQRT1_2;
      out.push_back(std::move(e));
    }
  return out;
}

inline Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

// Orthogonal projector onto the complement of span(ops) in flattened matrix space.
inline Matrix span_complement_projector(std::span<const Operator> ops) {
  const Index n2 = ops.front().size();
  Matrix flat(n2, static_cast<Index>(ops.size()));
  for (std::size_t k = 0; k < ops.size(); ++k) flat.col(static_cast<Index>(k)) = flatten(ops[k]);
  SubspaceBasis q = orthonormalize(flat);
  return Matrix::Identity(n2, n2) - q.projector();
}

}  // namespace detail

/// Linear constraint on an antisymmetric matrix, returned as a vector that
/// must vanish.
using LinearConstraint = std::function<Vector(const Operator&)>;

/// Solutions within `domain` (a list of operators spanning a subspace of
/// so(n), Frobenius-orthonormal) of constraint(A) = 0.
inline AlgebraBasis solve_in_span(std::span<const Operator> domain, Index n,
                                  const LinearConstraint& constraint, double rank_tol = 1e-9) {
  AlgebraBasis out{n, {}};
  if (domain.empty()) return out;
  Vector first = constraint(domain.front());
  if (first.size() == 0) {
    out.elements.assign(domain.begin(), domain.end());
    return out;
  }
  Matrix c(first.size(), static_cast<Index>(domain.size()));
  c.col(0) = first;
  for (std::size_t k = 1; k < domain.size(); ++k) c.col(static_cast<Index>(k)) = constraint(domain[k]);
  SubspaceBasis sol = nullspace(c, rank_tol);
  for (Index j = 0; j < sol.dim(); ++j) {
    Operator a = Operator::Zero(n, n);
    for (std::size_t k = 0; k < domain.size(); ++k) a += sol.matrix()(static_cast<Index>(k), j) * domain[k];
    out.elements.push_back(std::move(a));
  }
  return out;
}

/// {A in so(n) : [A, L] = 0 for every L}.
inline AlgebraBasis commutant_algebra(std::span<const Operator> structure, Index n,
                                      double rank_tol = 1e-9) {
  auto so = detail::antisymmetric_unit_basis(n);
  std::vector<Operator> ls(structure.begin(), structure.end());
  return solve_in_span(so, n, [&](const Operator& a) {
    Vector v(n * n * static_cast<Index>(ls.size()));
    for (std::size_t k = 0; k < ls.size(); ++k)
      v.segment(static_cast<Index>(k) * n * n, n * n) = detail::flatten(a * ls[k] - ls[k] * a);
    return v;
  }, rank_tol);
}

/// Lie algebra of the group inside so(n): the antisymmetric solutions of the
/// family's linearised invariance condition.
inline AlgebraBasis algebra_basis(const StructurePack& pack, double rank_tol = 1e-9) {
  const Index n = pack.spec.ambient_dim();
  auto so = detail::antisymmetric_unit_basis(n);
  const auto comm = [](const Operator& a, const Operator& l) { return Operator(a * l - l * a); };

  switch (pack.spec.family()) {
    case Family::SO: return AlgebraBasis{n, so};
    case Family::U:
    case Family::Sp: {
      auto ops = pack.operator_list();
      return commutant_algebra(ops, n, rank_tol);
    }
    case Family::SU: {
      const Operator& i = pack.op("I");
      return solve_in_span(so, n, [&](const Operator& a) {
        Vector v(n * n + 1);
        v.head(n * n) = detail::flatten(comm(a, i));
        v(n * n) = (i * a).trace();
        return v;
      }, rank_tol);
    }
    case Family::SpU1: {
      const Operator& i = pack.op("I");
      std::array<Operator, 2> jk{pack.op("J"), pack.op("K")};
      const Matrix off = detail::span_complement_projector(jk);
      return solve_in_span(so, n, [&](const Operator& a) {
        Vector v(3 * n * n);
        v.segment(0, n * n) = detail::flatten(comm(a, i));
        v.segment(n * n, n * n) = off * detail::flatten(comm(a, jk[0]));
        v.segment(2 * n * n, n * n) = off * detail::flatten(comm(a, jk[1]));
        return v;
      }, rank_tol);
    }
    case Family::SpSp1:
    case Family::Spin9: {
      auto ls = pack.operator_list();
      const Matrix off = detail::span_complement_projector(ls);
      return solve_in_span(so, n, [&](const Operator& a) {
        Vector v(n * n * static_cast<Index>(ls.size()));
        for (std::size_t k = 0; k < ls.size(); ++k)
          v.segment(static_cast<Index>(k) * n * n, n * n) = off * detail::flatten(comm(a, ls[k]));
        return v;
      }, rank_tol);
    }
    case Family::G2:
    case Family::Spin7: {
      const AlternatingForm& f = pack.forms.front().form;
      return solve_in_span(so, n, [&](const Operator& a) { return f.derivation_values(a); },
                           rank_tol);
    }
  }
  return {};
}

inline AlgebraBasis algebra_basis(const GroupSpec& spec, double rank_tol = 1e-9) {
  return algebra_basis(build_structures(spec), rank_tol);
}

/// Classical dimension of the algebra of `spec`.
inline Index expected_algebra_dim(const GroupSpec& spec) {
  const Index n = spec.n();
  switch (spec.family()) {
    case Family::SO: return n * (n - 1) / 2;
    case Family::U: return n * n;
    case Family::SU: return n * n - 1;
    case Family::Sp: return n * (2 * n + 1);
    case Family::SpU1: return n * (2 * n + 1) + 1;
    case Family::SpSp1: return n * (2 * n + 1) + 3;
    case Family::G2: return 14;
    case Family::Spin7: return 21;
    case Family::Spin9: return 36;
  }
  return 0;
}

namespace detail {
inline void require_ambient(const AlgebraBasis& g, const SubspaceBasis& p) {
  if (p.ambient_dim() != g.ambient_dim)
    throw std::invalid_argument("stabilizer: subspace dimension does not match the group");
}
}  // namespace detail

/// {A in g : A v = 0 for all v in P'}.
inline AlgebraBasis pointwise_stabilizer_algebra(const AlgebraBasis& g, const SubspaceBasis& p,
                                                 double rank_tol = 1e-9) {
  detail::require_ambient(g, p);
  if (p.dim() == 0) return g;
  const Matrix& q = p.matrix();
  return solve_in_span(g.elements, g.ambient_dim,
                       [&](const Operator& a) { return detail::flatten(a * q); }, rank_tol);
}

/// {A in g : A P' in P'}.
inline AlgebraBasis setwise_stabilizer_algebra(const AlgebraBasis& g, const SubspaceBasis& p,
                                               double rank_tol = 1e-9) {
  detail::require_ambient(g, p);
  if (p.dim() == 0) return g;
  const Matrix& q = p.matrix();
  const Matrix off = Matrix::Identity(g.ambient_dim, g.ambient_dim) - p.projector();
  return solve_in_span(g.elements, g.ambient_dim,
                       [&](const Operator& a) { return detail::flatten(off * a * q); }, rank_tol);
}

inline AlgebraBasis pointwise_stabilizer_algebra(const GroupSpec& spec, const SubspaceBasis& p) {
  return pointwise_stabilizer_algebra(algebra_basis(spec), p);
}

inline AlgebraBasis setwise_stabilizer_algebra(const GroupSpec& spec, const SubspaceBasis& p) {
  return setwise_stabilizer_algebra(algebra_basis(spec), p);
}

/// exp(t A) for antisymmetric A (Pade scaling and squaring).
inline Operator exp_element(const Operator& a, double t = 1.0) {
  if (a.rows() != a.cols()) throw std::invalid_argument("exp_element: matrix is not square");
  const double asym = (a + a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("exp_element: matrix is not antisymmetric");
  Matrix ta = t * a;
  return ta.exp();
}

/// Gaussian random element sum_k c_k A_k with c_k ~ N(0, scale^2).
template <class Rng>
Operator random_element(const AlgebraBasis& g, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Vector c(g.dim());
  for (Index k = 0; k < g.dim(); ++k) c(k) = gauss(rng);
  return g.combine(c);
}

/// Residual of m after projection onto span(g) (Frobenius).
inline double span_projection_residual(const AlgebraBasis& g, const Operator& m) {
  Vector v = detail::flatten(m);
  for (const auto& a : g.elements) v -= detail::flatten(a).dot(v) * detail::flatten(a);
  return v.norm();
}

/// max over basis pairs of the residual of [A_i, A_j] off the span.
inline double bracket_closure_residual(const AlgebraBasis& g) {
  double worst = 0.0;
  for (std::size_t i = 0; i < g.elements.size(); ++i)
    for (std::size_t j = i + 1; j < g.elements.size(); ++j) {
      Operator b = g.elements[i] * g.elements[j] - g.elements[j] * g.elements[i];
      worst = std::max(worst, span_projection_residual(g, b));
    }
  return worst;
}

/// Max |A + A^T| over the basis.
inline double antisymmetry_defect(const AlgebraBasis& g) {
  double worst = 0.0;
  for (const auto& a : g.elements) worst = std::max(worst, (a + a.transpose()).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace holoforge
