#pragma once
/**
 * @file weakcheck.hpp
 * @brief Weak-holonomy checks: the circle-loop counterexamples on S^6 and
 * S^7, structure coefficients of Sp(n)Sp(1) and Spin(9) elements, the
 * covering construction for SU(n) and Sp(n)U(1), and the forced-supergroup
 * table.
 */

#include "holoforge/liealg.hpp"
#include "holoforge/structures.hpp"
#include "holoforge/transport.hpp"

#include <complex>

namespace holoforge {

inline constexpr double kViolationThreshold = 1e-3;

struct CoordinateResidual {
  std::string name;
  double value = 0.0;
};

struct CounterexampleReport {
  int example_id = 1;
  double r = 0.0;
  int steps = 0;
  double gap_numeric = 0.0;
  double gap_closed_form = 0.0;
  bool violated = false;
  Vector start;  ///< X_0 (example 1) or Z_0 (example 2)
  Vector end;    ///< X_{2 pi} or Z_{2 pi}
  std::optional<double> factor;  ///< example 2: Theta(x_0, X, Y)_5 / Z_5 at t = 2 pi
  std::vector<CoordinateResidual> diagnostics;

  std::string verdict() const { return violated ? "VIOLATED" : "HOLDS"; }
  bool agrees(double tol = 1e-6) const { return std::abs(gap_numeric - gap_closed_form) < tol; }
};

namespace detail {
inline double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
}  // namespace detail

/// Circle loop on S^6: transports X_0 = x'_0 and Y_0 = I X_0. Agreement of
/// the transport with a unitary element on span{X_0, Y_0} would force
/// X_{2 pi} = X_0 because Y_{2 pi} = Y_0; the gap is measured in the second
/// coordinate. `closed_form` supplies the expected gap when the loop is not
/// the circle family.
inline CounterexampleReport example1_check(const Loop& loop, const Vector& x0_tangent,
                                           const Vector& y0_tangent, int steps = kDefaultSteps,
                                           std::optional<double> closed_form = std::nullopt) {
  CounterexampleReport rep;
  rep.example_id = 1;
  rep.r = loop.radius().value_or(1.0);
  rep.steps = steps;
  Matrix frame(loop.ambient_dim(), 2);
  frame << x0_tangent, y0_tangent;
  TransportResult tr = transport_columns(loop, frame, steps);
  rep.start = x0_tangent;
  rep.end = tr.vectors[0];
  rep.gap_numeric = std::abs(rep.end(1) - rep.start(1));
  rep.gap_closed_form = closed_form.value_or(0.0);
  rep.violated = rep.gap_numeric > kViolationThreshold;
  rep.diagnostics = {
      {"X_gap_norm", (rep.end - rep.start).norm()},
      {"Y_return_residual", detail::max_abs(tr.vectors[1] - y0_tangent)},
      {"Y_is_IX_residual", detail::max_abs(cross_product(loop.position(0.0), x0_tangent) - y0_tangent)},
      {"ortho_drift", tr.ortho_drift},
      {"tangency_drift", tr.tangency_drift},
  };
  return rep;
}

inline CounterexampleReport example1_check(double r, int steps = kDefaultSteps) {
  const double s = detail::circle_s(r);
  Loop loop = Loop::circle(r, 6);
  auto rep = example1_check(loop, closed_form_X(r, 0.0), closed_form_Y(r), steps,
                            r * (1.0 - std::cos(kTwoPi * s)));
  rep.diagnostics.push_back({"X_closed_form_residual", detail::max_abs(rep.end - closed_form_X(r, kTwoPi))});
  return rep;
}

/// Circle loop on S^7: transports X_0, Y_0 and Z_0 = Theta(x_0, X_0, Y_0).
/// Agreement with a Spin(7) element on span{X_0, Y_0, Z_0} would force
/// Z_{2 pi} = Theta(x_0, X_{2 pi}, Y_{2 pi}); compared in the fifth coordinate.
inline CounterexampleReport example2_check(double r, int steps = kDefaultSteps) {
  const double s = detail::circle_s(r);
  Loop loop = Loop::circle(r, 7);
  const Vector x0 = loop.position(0.0);
  const Vector xv = closed_form_X(r, 0.0, 7), yv = closed_form_Y(r, 7);
  const Vector zv = theta_point_cross(x0, xv, yv);
  Matrix frame(8, 3);
  frame << xv, yv, zv;
  TransportResult tr = transport_columns(loop, frame, steps);
  const Vector w = theta_point_cross(x0, tr.vectors[0], tr.vectors[1]);

  CounterexampleReport rep;
  rep.example_id = 2;
  rep.r = r;
  rep.steps = steps;
  rep.start = zv;
  rep.end = tr.vectors[2];
  rep.gap_numeric = std::abs(rep.end(4) - w(4));
  rep.gap_closed_form = r * r * r * s * (1.0 - std::cos(kTwoPi * s));
  rep.violated = rep.gap_numeric > kViolationThreshold;
  rep.factor = w(4) / rep.end(4);
  rep.diagnostics = {
      {"Z0_closed_form_residual", detail::max_abs(zv - closed_form_Z(r, 0.0))},
      {"Z_closed_form_residual", detail::max_abs(rep.end - closed_form_Z(r, kTwoPi))},
      {"X_closed_form_residual", detail::max_abs(tr.vectors[0] - closed_form_X(r, kTwoPi, 7))},
      {"Y_return_residual", detail::max_abs(tr.vectors[1] - yv)},
      {"factor_residual", std::abs(*rep.factor - std::cos(kTwoPi * s))},
      {"ortho_drift", tr.ortho_drift},
      {"tangency_drift", tr.tangency_drift},
  };
  return rep;
}

// ---------------------------------------------------------------------------
// Structure coefficients

struct CoefficientVector {
  Family context = Family::SpSp1;
  std::vector<double> values;
  double fit_residual = 0.0;    ///< |a(Lx) - sum c_i S_i a(x)|
  double probe_residual = 0.0;  ///< same on fresh probes z
  double norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
  }
};

/// Coefficients c with a(Lx) = sum_i c_i S_i a(x) over the structure
/// operators S_i, by least squares (the columns S_i a(x) are orthonormal).
/// The same coefficients are then tested on `probes` fresh unit vectors.
inline CoefficientVector structure_coefficients(const StructurePack& pack, const Operator& a,
                                                const Vector& x, const Operator& l, int probes = 10,
                                                std::uint64_t seed = 0xc0ef) {
  const Family f = pack.spec.family();
  if (f != Family::SpSp1 && f != Family::Spin9)
    throw std::invalid_argument("structure_coefficients: group must be Sp(n)Sp(1) or Spin(9)");
  const Index n = pack.spec.ambient_dim();
  if (a.rows() != n || x.size() != n || l.rows() != n)
    throw std::invalid_argument("structure_coefficients: dimension mismatch");
  if (std::abs(x.norm() - 1.0) > 1e-10) throw std::invalid_argument("structure_coefficients: probe must be a unit vector");
  auto ops = pack.operator_list();
  if (span_residual(l, ops) > 1e-8)
    throw std::invalid_argument("structure_coefficients: L is not in the structure span");

  const auto design = [&](const Vector& v) {
    Matrix m(n, static_cast<Index>(ops.size()));
    const Vector av = a * v;
    for (std::size_t i = 0; i < ops.size(); ++i) m.col(static_cast<Index>(i)) = ops[i] * av;
    return m;
  };
  const Matrix m = design(x);
  const Vector target = a * (l * x);
  const Vector c = m.colPivHouseholderQr().solve(target);
  CoefficientVector out;
  out.context = f;
  out.values.assign(c.data(), c.data() + c.size());
  out.fit_residual = (m * c - target).norm();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < probes; ++k) {
    Vector z(n);
    for (Index i = 0; i < n; ++i) z(i) = gauss(rng);
    z.normalize();
    out.probe_residual = std::max(out.probe_residual, (design(z) * c - a * (l * z)).norm());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Covering construction

struct CoverResult {
  bool found = false;
  Operator g;
  double residual = 0.0;     ///< max |g v - a v| over the basis of P
  double membership = 0.0;   ///< membership residual of g in the subgroup
  std::string error;
};

namespace detail {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline CVector to_complex(const Vector& v) {
  CVector z(v.size() / 2);
  for (Index k = 0; k < z.size(); ++k) z(k) = Complex(v(2 * k), v(2 * k + 1));
  return z;
}

inline Matrix to_real(const CMatrix& c) {
  Matrix m(2 * c.rows(), 2 * c.cols());
  for (Index i = 0; i < c.rows(); ++i)
    for (Index j = 0; j < c.cols(); ++j) {
      const double p = c(i, j).real(), q = c(i, j).imag();
      m(2 * i, 2 * j) = p;
      m(2 * i, 2 * j + 1) = -q;
      m(2 * i + 1, 2 * j) = q;
      m(2 * i + 1, 2 * j + 1) = p;
    }
  return m;
}

// Unitary matrix with first column z (unit), completed by Gram-Schmidt.
inline CMatrix complex_frame(const CVector& z) {
  const Index n = z.size();
  CMatrix u(n, n);
  u.col(0) = z;
  Index filled = 1;
  for (Index e = 0; e < n && filled < n; ++e) {
    CVector v = CVector::Unit(n, e);
    for (Index j = 0; j < filled; ++j) v -= u.col(j).dot(v) * u.col(j);
    if (v.norm() > 1e-6) u.col(filled++) = v.normalized();
  }
  return u;
}

// Real vectors b_1 = x, b_2, ... forming a quaternionic orthonormal basis:
// {b_k, I b_k, J b_k, K b_k} is orthonormal over all k.
inline std::vector<Vector> quaternionic_frame(const StructurePack& pack, const Vector& x) {
  const Index n = x.size();
  std::vector<Vector> out{x};
  std::vector<Vector> span;
  const auto add_span = [&](const Vector& b) {
    span.push_back(b);
    for (const char* name : {"I", "J", "K"}) span.push_back(pack.op(name) * b);
  };
  add_span(x);
  for (Index e = 0; e < n && static_cast<Index>(span.size()) < n; ++e) {
    Vector v = Vector::Unit(n, e);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& s : span) v -= s.dot(v) * s;
    if (v.norm() > 1e-6) {
      out.push_back(v.normalized());
      add_span(out.back());
    }
  }
  return out;
}

}  // namespace detail

/// Builds g in the subgroup (SU(n) or Sp(n)U(1)) with g(x) = a(x) by a
/// frame-completion solver, then checks g|P = a|P. `x` defaults to the first
/// basis vector of P.
inline CoverResult weak_cover_check(const StructurePack& sub, const Operator& a, const SubspaceBasis& p,
                                    std::optional<Vector> x_opt = std::nullopt) {
  CoverResult res;
  const Family f = sub.spec.family();
  if (f != Family::SU && f != Family::SpU1)
    throw std::invalid_argument("weak_cover_check: only SU(n) and Sp(n)U(1) are supported");
  const Index n = sub.spec.ambient_dim();
  if (a.rows() != n || a.cols() != n || p.ambient_dim() != n)
    throw std::invalid_argument("weak_cover_check: dimension mismatch");
  const Vector x = x_opt.value_or(p.vector(0));
  const Vector ax = a * x;
  if (std::abs(x.norm() - 1.0) > 1e-10 || std::abs(ax.norm() - 1.0) > 1e-8) {
    res.error = "a(x) is not a unit vector";
    res.residual = std::numeric_limits<double>::infinity();
    return res;
  }
  if (f == Family::SU) {
    detail::CMatrix u1 = detail::complex_frame(detail::to_complex(x));
    detail::CMatrix u2 = detail::complex_frame(detail::to_complex(ax));
    detail::CMatrix g = u2 * u1.adjoint();
    const detail::Complex d = std::conj(g.determinant());
    detail::CMatrix fix = detail::CMatrix::Identity(g.rows(), g.cols());
    fix(g.rows() - 1, g.cols() - 1) = d / std::abs(d);
    res.g = detail::to_real(u2 * fix * u1.adjoint());
  } else {
    const auto b = detail::quaternionic_frame(sub, x);
    const auto c = detail::quaternionic_frame(sub, ax);
    if (b.size() != c.size()) {
      res.error = "quaternionic frame completion failed";
      res.residual = std::numeric_limits<double>::infinity();
      return res;
    }
    res.g = Operator::Zero(n, n);
    for (std::size_t k = 0; k < b.size(); ++k) {
      res.g += c[k] * b[k].transpose();
      for (const char* name : {"I", "J", "K"}) {
        const Operator& s = sub.op(name);
        res.g += (s * c[k]) * (s * b[k]).transpose();
      }
    }
  }
  res.membership = membership_residual(sub, res.g);
  res.residual = detail::max_abs(Vector(((res.g - a) * p.matrix()).cwiseAbs().colwise().maxCoeff().transpose()));
  res.found = res.residual < 1e-8 && res.membership < 1e-8;
  return res;
}

/// Transport around the S^6 circle loop restricted to T_{x_0} S^6 in the
/// adapted basis (v1, I v1, v2, I v2, v3, I v3) with v1 = X_0 / r and
/// I = Phi(x_0, .), so that I is the standard complex structure on R^6.
struct TangentHolonomy {
  Matrix basis;     ///< 7 x 6, columns the adapted basis
  Operator matrix;  ///< 6 x 6 transport in the adapted basis
  TransportResult transport;
};

inline TangentHolonomy example1_tangent_holonomy(double r, int steps = kDefaultSteps) {
  Loop loop = Loop::circle(r, 6);
  const Vector x0 = loop.position(0.0);
  std::vector<Vector> cols;
  const auto add_pair = [&](Vector v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : cols) v -= c.dot(v) * c;
    v.normalize();
    cols.push_back(v);
    cols.push_back(cross_product(x0, v));
  };
  add_pair(closed_form_X(r, 0.0) / r);
  for (Index e = 0; e < 7 && cols.size() < 6; ++e) {
    Vector v = Vector::Unit(7, e);
    v -= x0.dot(v) * x0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : cols) v -= c.dot(v) * c;
    if (v.norm() > 1e-6) add_pair(v);
  }
  TangentHolonomy out;
  out.basis = Matrix(7, 6);
  for (Index j = 0; j < 6; ++j) out.basis.col(j) = cols[static_cast<std::size_t>(j)];
  out.transport = transport_frame(loop, SubspaceBasis::from_orthonormal(out.basis), steps);
  out.matrix = out.basis.transpose() * out.transport.matrix;
  return out;
}

// ---------------------------------------------------------------------------
// Forced supergroup

/// The group the weak-holonomy condition forces the holonomy into; only SU
/// and Sp(n)U(1) are forced into a strictly larger group.
inline GroupSpec forced_supergroup(const GroupSpec& g) {
  switch (g.family()) {
    case Family::SU: return GroupSpec(Family::U, g.n());
    case Family::SpU1: return GroupSpec(Family::U, 2 * g.n());
    default: return g;
  }
}

inline Family forced_supergroup(Family f) {
  switch (f) {
    case Family::SU:
    case Family::SpU1: return Family::U;
    default: return f;
  }
}

}  // namespace holoforge
