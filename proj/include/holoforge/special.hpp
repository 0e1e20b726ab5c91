#pragma once
/**
 * @file special.hpp
 * @brief Special subspaces generated by a subspace P' under the two
 * definitions (pointwise-stabilizer fixed space; P' plus an irreducible
 * summand of its complement under the setwise stabilizer) and a randomized
 * search for the minimal special dimension of a group.
 */

#include "holoforge/liealg.hpp"

#include <limits>
#include <map>
#include <tuple>

namespace holoforge {

enum class Definition { Pointwise = 1, Setwise = 2 };

inline int to_int(Definition d) { return static_cast<int>(d); }

struct SpecialCandidate {
  SubspaceBasis subspace;    ///< P
  SubspaceBasis complement;  ///< P minus P' (the summand V for the setwise definition)
  double certificate_spread = 0.0;
};

struct SpecialSubspaceReport {
  GroupSpec spec;
  Definition definition;
  SubspaceBasis generator;
  std::vector<SpecialCandidate> candidates;  // empty means NONE
  std::vector<Operator> extra_generators_used;
  Index stabilizer_dim = 0;
  bool refinement_changed = false;

  bool none() const { return candidates.empty(); }
  Index minimal_dim() const { return none() ? 0 : candidates.front().subspace.dim(); }
};

struct SpecialConfig {
  Tolerances tol{};
  std::uint64_t split_seed = 0x5eed;
  bool auto_component_generators = true;
};

namespace detail {

inline void require_proper(const GroupSpec& spec, const SubspaceBasis& p) {
  if (p.ambient_dim() != spec.ambient_dim())
    throw std::invalid_argument("special subspace: generator has the wrong ambient dimension");
  if (p.dim() >= p.ambient_dim())
    throw std::invalid_argument("special subspace: generator must be a proper subspace");
}

// Lexicographic key on the rounded projector entries; independent of the
// basis chosen for the subspace.
inline std::vector<long long> canonical_key(const SubspaceBasis& b) {
  Matrix p = b.projector();
  std::vector<long long> key;
  key.reserve(static_cast<std::size_t>(p.size()) + 1);
  key.push_back(b.dim());
  for (Index i = 0; i < p.size(); ++i) key.push_back(std::llround(p.data()[i] * 1e6));
  return key;
}

inline void sort_candidates(std::vector<SpecialCandidate>& c) {
  std::vector<std::pair<std::vector<long long>, std::size_t>> keys;
  for (std::size_t i = 0; i < c.size(); ++i) keys.push_back({canonical_key(c[i].subspace), i});
  std::sort(keys.begin(), keys.end());
  std::vector<SpecialCandidate> sorted;
  for (const auto& k : keys) sorted.push_back(std::move(c[k.second]));
  c = std::move(sorted);
}

// x . q for a unit imaginary quaternion q = (q1, q2, q3), as a real vector:
// right multiplication by i, j, k is -I, -J, -K.
inline Vector right_mul(const StructurePack& pack, const Vector& x, const Eigen::Vector3d& q) {
  return -(q(0) * (pack.op("I") * x) + q(1) * (pack.op("J") * x) + q(2) * (pack.op("K") * x));
}

inline Matrix quaternionic_line_projector(const StructurePack& pack, const Vector& b) {
  Matrix cols(b.size(), 4);
  cols << b, pack.op("I") * b, pack.op("J") * b, pack.op("K") * b;
  return cols * cols.transpose();
}

// Element v -> A v w^{-1} of Sp(n)Sp(1) with A x = x w, A y2 = -y2 w and A
// the identity on the quaternionic complement of x and y2; it fixes x and
// negates y = y1 + y2 whenever y1 lies in x.span{i,j,k} along an imaginary
// unit orthogonal to w.
inline Operator pin2_component(const StructurePack& pack, const Vector& x, const Vector& y2,
                               const Eigen::Vector3d& u, const Eigen::Vector3d& w) {
  const Eigen::Vector3d uw = u.cross(w);
  const Index n = x.size();
  Operator g = w(0) * pack.op("I") + w(1) * pack.op("J") + w(2) * pack.op("K");
  Matrix px = quaternionic_line_projector(pack, x);
  Matrix py = quaternionic_line_projector(pack, y2);
  g = g * (Matrix::Identity(n, n) - px - py);
  const auto line = [&](const Vector& b, double s) {
    Vector vw = right_mul(pack, b, w), vu = right_mul(pack, b, u), vuw = right_mul(pack, b, uw);
    return Matrix(s * (b * b.transpose() + vw * vw.transpose() - vu * vu.transpose() -
                       vuw * vuw.transpose()));
  };
  g += line(x, 1.0) + line(y2, -1.0);
  return g;
}

}  // namespace detail

/// Group elements outside the identity component of the setwise stabilizer
/// of a 2-dimensional P' = span{x, y}, y = y1 + y2 with y1 in the span of
/// Ix, Jx, Kx and y2 quaternionically orthogonal to x. For Sp(n)Sp(1) any
/// decomposition qualifies; for Sp(n)U(1) only y1 in span{Jx, Kx}. Each
/// returned element is verified to be a group member preserving P'.
inline std::vector<Operator> component_representatives(const StructurePack& pack,
                                                       const SubspaceBasis& p,
                                                       double tol = 1e-8) {
  std::vector<Operator> out;
  const Family f = pack.spec.family();
  if ((f != Family::SpSp1 && f != Family::SpU1) || p.dim() != 2) return out;
  const Vector x = p.vector(0);
  const Vector y = p.vector(1);
  const Eigen::Vector3d c((pack.op("I") * x).dot(y), (pack.op("J") * x).dot(y),
                          (pack.op("K") * x).dot(y));
  const Vector y1 = c(0) * (pack.op("I") * x) + c(1) * (pack.op("J") * x) + c(2) * (pack.op("K") * x);
  const Vector y2 = y - y1 - x.dot(y) * x;
  if (c.norm() < 1e-6 || y2.norm() < 1e-6) return out;
  // y1 = x . (-u |c|) with u = c / |c|
  const Eigen::Vector3d u = c.normalized();
  Eigen::Vector3d w;
  if (f == Family::SpU1) {
    if (std::abs(u(0)) > 1e-9) return out;
    w = Eigen::Vector3d(1, 0, 0);
  } else {
    const Eigen::Vector3d axis = std::abs(u(0)) < 0.9 ? Eigen::Vector3d(1, 0, 0) : Eigen::Vector3d(0, 1, 0);
    w = u.cross(axis).normalized();
  }
  Operator g = detail::pin2_component(pack, x, y2.normalized(), u, w);
  std::array<Operator, 1> gs{g};
  if (membership_residual(pack, g) < tol && invariance_defect(p, gs) < tol) out.push_back(std::move(g));
  return out;
}

/// Special subspace (pointwise definition) generated by P': the joint fixed
/// space of the pointwise stabilizer, refined by optional extra stabilizer
/// elements g (via g - 1). NONE when it does not strictly contain P'.
inline SpecialSubspaceReport def1_special(const StructurePack& pack, const AlgebraBasis& algebra,
                                          const SubspaceBasis& generator,
                                          std::span<const Operator> extras = {},
                                          const SpecialConfig& cfg = {}) {
  detail::require_proper(pack.spec, generator);
  SpecialSubspaceReport rep{pack.spec, Definition::Pointwise, generator, {}, {}, 0, false};
  AlgebraBasis h = pointwise_stabilizer_algebra(algebra, generator, cfg.tol.rank_tol);
  rep.stabilizer_dim = h.dim();
  std::vector<Operator> ops = h.elements;
  const Index n = pack.spec.ambient_dim();
  for (const auto& g : extras) {
    ops.push_back(g - Matrix::Identity(n, n));
    rep.extra_generators_used.push_back(g);
  }
  SubspaceBasis fixed = fixed_subspace(ops, n, cfg.tol.rank_tol);
  if (fixed.dim() > generator.dim()) {
    // P minus P'
    Matrix r = fixed.matrix() - generator.matrix() * (generator.matrix().transpose() * fixed.matrix());
    SubspaceBasis v = orthonormalize(r, 1e-6);
    rep.candidates.push_back({direct_sum(generator, v), v, 0.0});
  }
  return rep;
}

/// Special subspaces (setwise definition) generated by P': P' + V for each
/// irreducible summand V of the complement under the setwise stabilizer
/// algebra, optionally refined by extra stabilizer elements. Candidates are
/// sorted by dimension.
inline SpecialSubspaceReport def2_special(const StructurePack& pack, const AlgebraBasis& algebra,
                                          const SubspaceBasis& generator,
                                          std::span<const Operator> extras = {},
                                          const SpecialConfig& cfg = {}) {
  detail::require_proper(pack.spec, generator);
  SpecialSubspaceReport rep{pack.spec, Definition::Setwise, generator, {}, {}, 0, false};
  AlgebraBasis h = setwise_stabilizer_algebra(algebra, generator, cfg.tol.rank_tol);
  rep.stabilizer_dim = h.dim();
  SubspaceBasis complement = orthogonal_complement(generator, cfg.tol.rank_tol);
  SplitConfig split{cfg.tol.rank_tol, cfg.tol.cert_tol, cfg.split_seed};

  std::vector<Operator> refine(extras.begin(), extras.end());
  if (cfg.auto_component_generators) {
    for (auto& g : component_representatives(pack, generator)) refine.push_back(std::move(g));
  }
  auto pieces = invariant_complement_split(complement, h.elements, split);
  if (!refine.empty()) {
    std::vector<Operator> ops = h.elements;
    ops.insert(ops.end(), refine.begin(), refine.end());
    auto refined = invariant_complement_split(complement, ops, split);
    rep.refinement_changed = piece_dims(refined) != piece_dims(pieces);
    pieces = std::move(refined);
    rep.extra_generators_used = refine;
  }
  for (auto& piece : pieces)
    rep.candidates.push_back({direct_sum(generator, piece.basis), piece.basis, piece.certificate_spread});
  detail::sort_candidates(rep.candidates);
  return rep;
}

inline SpecialSubspaceReport special_subspaces(const StructurePack& pack, const AlgebraBasis& algebra,
                                               Definition def, const SubspaceBasis& generator,
                                               std::span<const Operator> extras = {},
                                               const SpecialConfig& cfg = {}) {
  return def == Definition::Pointwise ? def1_special(pack, algebra, generator, extras, cfg)
                                      : def2_special(pack, algebra, generator, extras, cfg);
}

inline SpecialSubspaceReport def1_special(const GroupSpec& spec, const SubspaceBasis& generator,
                                          std::span<const Operator> extras = {}) {
  auto pack = build_structures(spec);
  return def1_special(pack, algebra_basis(pack), generator, extras);
}

inline SpecialSubspaceReport def2_special(const GroupSpec& spec, const SubspaceBasis& generator,
                                          std::span<const Operator> extras = {}) {
  auto pack = build_structures(spec);
  return def2_special(pack, algebra_basis(pack), generator, extras);
}

// ---------------------------------------------------------------------------
// Expected minimal dimensions

/// Minimal special dimension per family and definition. The definitions
/// disagree only for Sp(n).
inline Index expected_minimal_dim(const GroupSpec& spec, Definition def) {
  switch (spec.family()) {
    case Family::SO: return spec.ambient_dim();
    case Family::U:
    case Family::SU:
    case Family::SpU1: return 2;
    case Family::Sp: return def == Definition::Pointwise ? 4 : 2;
    case Family::SpSp1: return 4;
    case Family::G2: return 3;
    case Family::Spin7:
    case Family::Spin9: return 4;
  }
  return 0;
}

struct MinimalRule {
  Family family;
  Definition definition;
  std::string rule;  ///< "n" for SO, otherwise a constant
};

inline std::vector<MinimalRule> expected_minimal_table() {
  std::vector<MinimalRule> out;
  for (Definition d : {Definition::Pointwise, Definition::Setwise})
    for (Family f : kAllFamilies) {
      std::string rule;
      if (f == Family::SO) {
        rule = "n";
      } else {
        GroupSpec s(f, f == Family::SU ? 3 : 2);
        rule = std::to_string(expected_minimal_dim(s, d));
      }
      out.push_back({f, d, rule});
    }
  return out;
}

/// The instance set exercised by the reports: two sizes per classical
/// family plus the exceptional groups.
inline std::vector<GroupSpec> reference_instances() {
  return {GroupSpec(Family::SO, 5),    GroupSpec(Family::SO, 7),   GroupSpec(Family::U, 2),
          GroupSpec(Family::U, 3),     GroupSpec(Family::SU, 3),   GroupSpec(Family::SU, 4),
          GroupSpec(Family::Sp, 2),    GroupSpec(Family::Sp, 3),   GroupSpec(Family::SpU1, 2),
          GroupSpec(Family::SpSp1, 2), GroupSpec(Family::G2),      GroupSpec(Family::Spin7),
          GroupSpec(Family::Spin9)};
}

// ---------------------------------------------------------------------------
// Randomized search

namespace detail {

template <class Rng>
Vector gaussian_vector(Index n, Rng& rng) {
  std::normal_distribution<double> gauss;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

template <class Rng>
Vector unit_vector(Index n, Rng& rng) {
  return gaussian_vector(n, rng).normalized();
}

// Random unit vector in the orthogonal complement of span(cols).
template <class Rng>
Vector unit_orthogonal_to(const Matrix& cols, Rng& rng) {
  SubspaceBasis q = orthonormalize(cols);
  return q.residual(gaussian_vector(cols.rows(), rng)).normalized();
}

template <class Rng>
double log_uniform(double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline SubspaceBasis frame(std::initializer_list<Vector> vs) {
  std::vector<Vector> v(vs);
  return orthonormalize(std::span<const Vector>(v));
}

}  // namespace detail

/// The +1 eigen-involution of span{I_1..I_9} determined by a unit x,
/// sum_a <I_a x, x> I_a.
inline Operator spin9_involution(const StructurePack& pack, const Vector& x) {
  Operator out = Operator::Zero(x.size(), x.size());
  for (const auto& o : pack.operators) out += (o.matrix * x).dot(x) * o.matrix;
  return out;
}

/// Structured generating subspaces of dimension m mirroring the sub-cases of
/// the classification (measure-zero strata random frames miss).
template <class Rng>
std::vector<SubspaceBasis> structured_generators(const StructurePack& pack, Index m, Rng& rng) {
  using detail::frame;
  std::vector<SubspaceBasis> out;
  const Index n = pack.spec.ambient_dim();
  const Vector x = detail::unit_vector(n, rng);
  switch (pack.spec.family()) {
    case Family::U:
    case Family::SU: {
      const Vector ix = pack.op("I") * x;
      if (m == 2) {
        Matrix xi(n, 2);
        xi << x, ix;
        out.push_back(frame({x, ix}));
        out.push_back(frame({x, detail::unit_orthogonal_to(xi, rng)}));
        const double lam = detail::log_uniform(0.1, 10.0, rng);
        out.push_back(frame({x, lam * ix + detail::unit_orthogonal_to(xi, rng)}));
      }
      break;
    }
    case Family::Sp:
    case Family::SpU1:
    case Family::SpSp1: {
      const Vector ix = pack.op("I") * x, jx = pack.op("J") * x, kx = pack.op("K") * x;
      Matrix line(n, 4);
      line << x, ix, jx, kx;
      const Eigen::Vector3d l = detail::unit_vector(3, rng);
      const Vector lx = l(0) * ix + l(1) * jx + l(2) * kx;
      const Eigen::Vector3d l2 = Eigen::Vector3d(0, l(1), l(2)).normalized();
      const Vector jkx = l2(1) * jx + l2(2) * kx;
      if (m == 2) {
        out.push_back(frame({x, ix}));
        out.push_back(frame({x, lx}));
        out.push_back(frame({x, jkx}));
        if (n > 4) {
          const Vector y2 = detail::unit_orthogonal_to(line, rng);
          const double lam = detail::log_uniform(0.1, 10.0, rng);
          out.push_back(frame({x, y2}));
          out.push_back(frame({x, lam * ix + y2}));
          out.push_back(frame({x, lam * lx + y2}));
          out.push_back(frame({x, lam * jkx + y2}));
        }
      } else if (m == 3) {
        out.push_back(frame({x, ix, jx}));
        if (n > 4) {
          const Vector y2 = detail::unit_orthogonal_to(line, rng);
          out.push_back(frame({x, lx, y2}));
        }
      }
      break;
    }
    case Family::G2: {
      const Vector y = detail::unit_vector(n, rng);
      if (m == 2) out.push_back(frame({x, y}));
      if (m == 3) out.push_back(frame({x, y, cross_product(x, y)}));
      break;
    }
    case Family::Spin7: {
      const Vector y = detail::unit_vector(n, rng), z = detail::unit_vector(n, rng);
      if (m == 3) out.push_back(frame({x, y, triple_cross(x, y, z)}));
      break;
    }
    case Family::Spin9: {
      const Operator ix = spin9_involution(pack, x);
      const Matrix id = Matrix::Identity(n, n);
      // U = (+1 eigenspace) minus x, V = -1 eigenspace
      const Matrix pu = 0.5 * (id + ix) - x * x.transpose();
      const Matrix pv = 0.5 * (id - ix);
      const Vector y1 = (pu * detail::gaussian_vector(n, rng)).normalized();
      const Vector y2 = (pv * detail::gaussian_vector(n, rng)).normalized();
      const double lam = detail::log_uniform(0.1, 10.0, rng);
      if (m == 2) {
        out.push_back(frame({x, y1}));
        out.push_back(frame({x, y2}));
        out.push_back(frame({x, lam * y1 + y2}));
      } else if (m == 3) {
        out.push_back(frame({x, y1, y2}));
      }
      break;
    }
    case Family::SO: break;
  }
  return out;
}

struct SearchLevel {
  Index generator_dim = 0;
  Index evaluated = 0;
  Index structured = 0;
  Index best_dim = 0;  ///< 0 when no generator of this dimension produced a special subspace
};

struct MinimalSearchResult {
  GroupSpec spec;
  Definition definition;
  Index dim = 0;  ///< 0 if nothing found
  std::optional<SpecialSubspaceReport> witness;
  std::vector<SearchLevel> levels;
  Index total_evaluated = 0;
};

/// Smallest special subspace found over generating subspaces of dimension
/// m = 1, 2, ...: `trials` Haar-random frames per level plus structured
/// families. Stops once m + 1 reaches the best dimension found.
inline MinimalSearchResult minimal_special_dimension(const StructurePack& pack,
                                                     const AlgebraBasis& algebra, Definition def,
                                                     int trials, std::uint64_t sampler_seed,
                                                     const SpecialConfig& cfg = {}) {
  if (trials < 1) throw std::invalid_argument("minimal_special_dimension: trials must be >= 1");
  const Index n = pack.spec.ambient_dim();
  MinimalSearchResult res{pack.spec, def, 0, std::nullopt, {}, 0};
  std::mt19937_64 rng(sampler_seed);
  Index best = std::numeric_limits<Index>::max();
  for (Index m = 1; m < n && m + 1 < best; ++m) {
    SearchLevel level{m, 0, 0, 0};
    std::vector<SubspaceBasis> gens;
    for (int t = 0; t < trials; ++t) {
      Matrix cols(n, m);
      for (Index j = 0; j < m; ++j) cols.col(j) = detail::gaussian_vector(n, rng);
      gens.push_back(orthonormalize(cols));
    }
    auto structured = structured_generators(pack, m, rng);
    level.structured = static_cast<Index>(structured.size());
    for (auto& s : structured)
      if (s.dim() == m) gens.push_back(std::move(s));
    for (const auto& g : gens) {
      SpecialSubspaceReport rep = special_subspaces(pack, algebra, def, g, {}, cfg);
      ++level.evaluated;
      if (rep.none()) continue;
      const Index d = rep.minimal_dim();
      if (level.best_dim == 0 || d < level.best_dim) level.best_dim = d;
      if (d < best) {
        best = d;
        res.witness = std::move(rep);
      }
    }
    res.total_evaluated += level.evaluated;
    res.levels.push_back(level);
  }
  res.dim = res.witness ? best : 0;
  return res;
}

inline MinimalSearchResult minimal_special_dimension(const GroupSpec& spec, Definition def,
                                                     int trials, std::uint64_t sampler_seed) {
  auto pack = build_structures(spec);
  return minimal_special_dimension(pack, algebra_basis(pack), def, trials, sampler_seed);
}

}  // namespace holoforge
