#pragma once
/**
 * @file linalg.hpp
 * @brief Dense linear-algebra kernel: orthonormal subspaces, nullspaces of
 * linear constraint systems, joint kernels, invariant closures and splitting
 * of invariant subspaces into real-irreducible pieces.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace holoforge {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense square real matrix acting on the ambient space.
using Operator = Eigen::MatrixXd;

struct Tolerances {
  double rank_tol = 1e-9;  ///< relative singular-value cutoff
  double ode_tol = 1e-7;   ///< transport comparison tolerance
  double cert_tol = 1e-7;  ///< eigenvalue separation for irreducibility

  void validate() const {
    if (!(rank_tol > 0.0 && rank_tol < 1.0))
      throw std::invalid_argument("rank_tol must lie in (0, 1)");
    if (!(ode_tol > 0.0)) throw std::invalid_argument("ode_tol must be positive");
    if (!(cert_tol > 0.0)) throw std::invalid_argument("cert_tol must be positive");
  }
};

/// Orthonormal basis of a linear subspace of R^n, stored as the columns of an
/// n x k matrix. The zero subspace has k = 0.
class SubspaceBasis {
 public:
  explicit SubspaceBasis(Index ambient_dim = 0) : basis_(ambient_dim, 0) {}

  /// Wraps columns that are already orthonormal. Not re-checked.
  static SubspaceBasis from_orthonormal(Matrix columns) {
    SubspaceBasis b;
    b.basis_ = std::move(columns);
    return b;
  }

  static SubspaceBasis full(Index ambient_dim) {
    return from_orthonormal(Matrix::Identity(ambient_dim, ambient_dim));
  }

  Index ambient_dim() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  bool empty() const { return basis_.cols() == 0; }

  const Matrix& matrix() const { return basis_; }
  Vector vector(Index i) const { return basis_.col(i); }

  Matrix projector() const { return basis_ * basis_.transpose(); }

  /// Component of v orthogonal to this subspace.
  Vector residual(const Vector& v) const { return v - basis_ * (basis_.transpose() * v); }

  /// Largest deviation of the Gram matrix from the identity.
  double orthonormality_defect() const {
    if (dim() == 0) return 0.0;
    return (basis_.transpose() * basis_ - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
  }

 private:
  Matrix basis_;
};

namespace detail {

// Singular values at or below this are treated as zero. The cutoff is
// relative to the largest singular value, floored at 1 so that a constraint
// system made entirely of round-off is recognised as the zero system.
inline double rank_cutoff(double sigma_max, double rank_tol) {
  return rank_tol * std::max(sigma_max, 1.0);
}

inline void require_same_rows(const Matrix& a, Index rows, const char* what) {
  if (a.rows() != rows)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace detail

/// Orthonormal basis of the column span of `columns`.
inline SubspaceBasis orthonormalize(const Matrix& columns, double rank_tol = 1e-9) {
  const Index n = columns.rows();
  if (columns.cols() == 0) return SubspaceBasis(n);
  Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = detail::rank_cutoff(s.size() ? s(0) : 0.0, rank_tol);
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return SubspaceBasis::from_orthonormal(svd.matrixU().leftCols(r));
}

inline SubspaceBasis orthonormalize(std::span<const Vector> vectors, Index ambient_dim,
                                    double rank_tol = 1e-9) {
  Matrix m(ambient_dim, static_cast<Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != ambient_dim)
      throw std::invalid_argument("orthonormalize: dimension mismatch among inputs");
    m.col(static_cast<Index>(i)) = vectors[i];
  }
  return orthonormalize(m, rank_tol);
}

inline SubspaceBasis orthonormalize(std::span<const Vector> vectors, double rank_tol = 1e-9) {
  if (vectors.empty()) throw std::invalid_argument("orthonormalize: no vectors and no dimension");
  return orthonormalize(vectors, vectors.front().size(), rank_tol);
}

/// Solution space {c in R^m : C c = 0} of a constraint matrix with m columns.
inline SubspaceBasis nullspace(const Matrix& constraints, double rank_tol = 1e-9) {
  const Index m = constraints.cols();
  if (constraints.rows() == 0 || m == 0) return SubspaceBasis::full(m);
  // Tall systems are compressed to their R factor first.
  Matrix reduced;
  if (constraints.rows() > 2 * m) {
    Eigen::HouseholderQR<Matrix> qr(constraints);
    reduced = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  } else {
    reduced = constraints;
  }
  Eigen::JacobiSVD<Matrix> svd(reduced, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = detail::rank_cutoff(s.size() ? s(0) : 0.0, rank_tol);
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return SubspaceBasis::from_orthonormal(svd.matrixV().rightCols(m - r));
}

inline SubspaceBasis nullspace(std::span<const Vector> rows, Index coeff_dim,
                               double rank_tol = 1e-9) {
  Matrix c(static_cast<Index>(rows.size()), coeff_dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != coeff_dim)
      throw std::invalid_argument("nullspace: rows of differing dimension");
    c.row(static_cast<Index>(i)) = rows[i].transpose();
  }
  return nullspace(c, rank_tol);
}

inline SubspaceBasis orthogonal_complement(const SubspaceBasis& b, double rank_tol = 1e-9) {
  if (b.dim() == 0) return SubspaceBasis::full(b.ambient_dim());
  return nullspace(Matrix(b.matrix().transpose()), rank_tol);
}

/// Orthogonal direct sum of two mutually orthogonal subspaces.
inline SubspaceBasis direct_sum(const SubspaceBasis& a, const SubspaceBasis& b) {
  detail::require_same_rows(b.matrix(), a.ambient_dim(), "direct_sum");
  Matrix m(a.ambient_dim(), a.dim() + b.dim());
  m << a.matrix(), b.matrix();
  return SubspaceBasis::from_orthonormal(std::move(m));
}

/// Joint kernel {v : A v = 0 for all A}.
inline SubspaceBasis fixed_subspace(std::span<const Operator> operators, Index ambient_dim,
                                    double rank_tol = 1e-9) {
  if (operators.empty()) return SubspaceBasis::full(ambient_dim);
  Matrix stacked(ambient_dim * static_cast<Index>(operators.size()), ambient_dim);
  for (std::size_t i = 0; i < operators.size(); ++i) {
    const auto& a = operators[i];
    if (a.rows() != ambient_dim || a.cols() != ambient_dim)
      throw std::invalid_argument("fixed_subspace: operator dimension mismatch");
    stacked.middleRows(static_cast<Index>(i) * ambient_dim, ambient_dim) = a;
  }
  return nullspace(stacked, rank_tol);
}

/// Smallest subspace containing `seed` and mapped into itself by every
/// operator. The seed basis is kept as the leading columns.
inline SubspaceBasis smallest_invariant_extension(const SubspaceBasis& seed,
                                                  std::span<const Operator> operators,
                                                  double rank_tol = 1e-9) {
  const Index n = seed.ambient_dim();
  for (const auto& a : operators)
    if (a.rows() != n || a.cols() != n)
      throw std::invalid_argument("smallest_invariant_extension: dimension mismatch");

  Matrix current = seed.matrix();
  Matrix frontier = current;
  for (Index round = 0; round <= n && frontier.cols() > 0; ++round) {
    Matrix images(n, frontier.cols() * static_cast<Index>(operators.size()));
    double scale = 1.0;
    for (std::size_t k = 0; k < operators.size(); ++k) {
      auto block = images.middleCols(static_cast<Index>(k) * frontier.cols(), frontier.cols());
      block = operators[k] * frontier;
      scale = std::max(scale, block.norm());
    }
    if (images.cols() == 0) break;
    images -= current * (current.transpose() * images);
    // second pass keeps the fresh directions orthogonal to the running basis
    images -= current * (current.transpose() * images);
    Eigen::JacobiSVD<Matrix> svd(images, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > rank_tol * scale) ++r;
    frontier = svd.matrixU().leftCols(r);
    Matrix grown(n, current.cols() + r);
    grown << current, frontier;
    current = std::move(grown);
  }
  return SubspaceBasis::from_orthonormal(std::move(current));
}

/// Largest principal angle between two subspaces of equal dimension; pi/2
/// when the dimensions differ.
inline double largest_principal_angle(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) return M_PI / 2;
  if (a.dim() == 0) return 0.0;
  // sines of the principal angles are the singular values of (1 - AA^T) B
  Matrix r = b.matrix() - a.matrix() * (a.matrix().transpose() * b.matrix());
  Eigen::JacobiSVD<Matrix> svd(r);
  return std::asin(std::min(1.0, svd.singularValues()(0)));
}

inline bool same_subspace(const SubspaceBasis& a, const SubspaceBasis& b, double angle_tol = 1e-7) {
  return largest_principal_angle(a, b) < angle_tol;
}

/// True when every vector of `inner` lies in `outer`.
inline bool contains(const SubspaceBasis& outer, const SubspaceBasis& inner, double tol = 1e-8) {
  if (inner.dim() == 0) return true;
  Matrix r = inner.matrix() - outer.matrix() * (outer.matrix().transpose() * inner.matrix());
  return r.cwiseAbs().maxCoeff() < tol;
}

/// Max residual of A(space) leaving space, over all operators.
inline double invariance_defect(const SubspaceBasis& space, std::span<const Operator> operators) {
  double worst = 0.0;
  const Matrix& q = space.matrix();
  for (const auto& a : operators) {
    if (q.cols() == 0) break;
    Matrix img = a * q;
    Matrix r = img - q * (q.transpose() * img);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Irreducible splitting

struct SplitConfig {
  double rank_tol = 1e-9;
  double cert_tol = 1e-7;
  std::uint64_t seed = 0x5eed;
};

/// An invariant piece of a decomposition together with its certificate: the
/// largest eigenvalue spread among the symmetric commutant basis elements
/// restricted to the piece (zero for a scalar commutant).
struct IrreduciblePiece {
  SubspaceBasis basis;
  double certificate_spread = 0.0;
  Index commutant_dim = 1;
};

/// Basis (Frobenius-orthonormal) of the symmetric d x d matrices commuting
/// with each of the restricted operators Q^T A Q.
inline std::vector<Matrix> symmetric_commutant(const SubspaceBasis& space,
                                               std::span<const Operator> operators,
                                               double rank_tol = 1e-9) {
  const Index d = space.dim();
  const Index m = d * (d + 1) / 2;
  std::vector<Matrix> coeff_basis;
  coeff_basis.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j) {
      Matrix s = Matrix::Zero(d, d);
      if (i == j) {
        s(i, i) = 1.0;
      } else {
        s(i, j) = s(j, i) = M_SQRT1_2;
      }
      coeff_basis.push_back(std::move(s));
    }
  if (operators.empty() || d == 0) return coeff_basis;

  std::vector<Matrix> restricted;
  restricted.reserve(operators.size());
  for (const auto& a : operators)
    restricted.push_back(space.matrix().transpose() * a * space.matrix());

  Matrix c(d * d * static_cast<Index>(restricted.size()), m);
  for (Index k = 0; k < m; ++k) {
    const Matrix& s = coeff_basis[static_cast<std::size_t>(k)];
    for (std::size_t r = 0; r < restricted.size(); ++r) {
      Matrix comm = s * restricted[r] - restricted[r] * s;
      c.block(static_cast<Index>(r) * d * d, k, d * d, 1) =
          Eigen::Map<const Vector>(comm.data(), d * d);
    }
  }
  SubspaceBasis sol = nullspace(c, rank_tol);
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(sol.dim()));
  for (Index j = 0; j < sol.dim(); ++j) {
    Matrix s = Matrix::Zero(d, d);
    for (Index k = 0; k < m; ++k) s += sol.matrix()(k, j) * coeff_basis[static_cast<std::size_t>(k)];
    out.push_back(std::move(s));
  }
  return out;
}

namespace detail {

inline double eigen_spread(const Matrix& s) {
  if (s.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
}

inline void split_recursive(const SubspaceBasis& space, std::span<const Operator> operators,
                            const SplitConfig& cfg, std::mt19937_64& rng,
                            std::vector<IrreduciblePiece>& out) {
  if (space.dim() == 0) return;
  std::vector<Matrix> comm = symmetric_commutant(space, operators, cfg.rank_tol);
  if (comm.size() <= 1) {
    double spread = 0.0;
    for (const auto& s : comm) spread = std::max(spread, eigen_spread(s));
    out.push_back({space, spread, static_cast<Index>(comm.size())});
    return;
  }
  std::normal_distribution<double> gauss;
  Matrix s = Matrix::Zero(space.dim(), space.dim());
  for (const auto& c : comm) s += gauss(rng) * c;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Vector& w = es.eigenvalues();
  Index start = 0;
  for (Index i = 1; i <= w.size(); ++i) {
    if (i == w.size() || w(i) - w(i - 1) > cfg.cert_tol) {
      Matrix cols = space.matrix() * es.eigenvectors().middleCols(start, i - start);
      split_recursive(SubspaceBasis::from_orthonormal(std::move(cols)), operators, cfg, rng, out);
      start = i;
    }
  }
}

}  // namespace detail

/// Decomposes an invariant subspace into minimal invariant pieces by
/// recursively splitting along eigenspaces of a random symmetric commutant
/// element. Complex- and quaternionic-type irreducibles have scalar symmetric
/// commutant and are kept whole.
inline std::vector<IrreduciblePiece> invariant_complement_split(const SubspaceBasis& space,
                                                                std::span<const Operator> operators,
                                                                const SplitConfig& cfg = {}) {
  for (const auto& a : operators)
    if (a.rows() != space.ambient_dim() || a.cols() != space.ambient_dim())
      throw std::invalid_argument("invariant_complement_split: dimension mismatch");
  double scale = 1.0;
  for (const auto& a : operators) scale = std::max(scale, a.cwiseAbs().maxCoeff());
  const double defect = invariance_defect(space, operators);
  if (defect > 1e3 * cfg.rank_tol * scale)
    throw std::invalid_argument("invariant_complement_split: space is not invariant (defect " +
                                std::to_string(defect) + ")");
  std::mt19937_64 rng(cfg.seed);
  std::vector<IrreduciblePiece> out;
  detail::split_recursive(space, operators, cfg, rng, out);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.basis.dim() < b.basis.dim();
  });
  return out;
}

/// Dimensions of the pieces, ascending.
inline std::vector<Index> piece_dims(const std::vector<IrreduciblePiece>& pieces) {
  std::vector<Index> dims;
  for (const auto& p : pieces) dims.push_back(p.basis.dim());
  std::sort(dims.begin(), dims.end());
  return dims;
}

}  // namespace holoforge
