#pragma once
/**
 * @file transport.hpp
 * @brief Parallel transport along loops on round spheres, by RK4 on
 * dX/dt = -<x', X> x with per-step tangency reprojection, plus closed forms
 * for the circle family x_t = (r cos t, r sin t, 0, sqrt(1 - r^2), 0, ...).
 */

#include "holoforge/linalg.hpp"

#include <functional>
#include <memory>
#include <numbers>
#include <optional>

namespace holoforge {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr int kDefaultSteps = 200000;

namespace detail {
inline double circle_s(double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("circle loop: r must lie in (0, 1)");
  return std::sqrt(1.0 - r * r);
}
}  // namespace detail

/// A closed curve t -> x_t on the unit sphere of R^d, t in [0, 2 pi].
class Loop {
 public:
  using Curve = std::function<Vector(double)>;

  /// x_t = (r cos t, r sin t, 0, sqrt(1 - r^2), 0, ...) on S^sphere_dim.
  static Loop circle(double r, int sphere_dim = 6) {
    const double s = detail::circle_s(r);
    if (sphere_dim != 6 && sphere_dim != 7)
      throw std::invalid_argument("circle loop: sphere dimension must be 6 or 7");
    const Index d = sphere_dim + 1;
    Loop l;
    l.ambient_ = d;
    l.radius_ = r;
    l.kind_ = "circle";
    l.pos_ = [=](double t) {
      Vector x = Vector::Zero(d);
      x(0) = r * std::cos(t);
      x(1) = r * std::sin(t);
      x(3) = s;
      return x;
    };
    l.vel_ = [=](double t) {
      Vector v = Vector::Zero(d);
      v(0) = -r * std::sin(t);
      v(1) = r * std::cos(t);
      return v;
    };
    return l;
  }

  /// Loop from a position callable. Without a velocity callable the
  /// derivative is taken by a fourth-order central difference.
  static Loop sampled(Curve position, Index ambient_dim, Curve velocity = nullptr) {
    Loop l;
    l.ambient_ = ambient_dim;
    l.kind_ = "sampled";
    l.pos_ = std::move(position);
    if (velocity) {
      l.vel_ = std::move(velocity);
    } else {
      l.vel_ = [p = l.pos_](double t) {
        const double h = 1e-3;
        return Vector((8.0 * (p(t + h) - p(t - h)) - (p(t + 2 * h) - p(t - 2 * h))) / (12.0 * h));
      };
    }
    l.validate();
    return l;
  }

  /// Periodic cubic spline through columns of `table`, sampled at
  /// t_k = 2 pi k / N (the closing sample x_{2 pi} = x_0 is implicit).
  /// Interpolated points are renormalized onto the sphere; the spline error
  /// itself is the caller's responsibility.
  static Loop sampled(const Matrix& table);

  static Loop constant(const Vector& point) {
    return sampled([point](double) { return point; }, point.size(),
                   [n = point.size()](double) { return Vector(Vector::Zero(n)); });
  }

  /// (cos t, sin t, 0, ...) on S^sphere_dim.
  static Loop great_circle(int sphere_dim = 6) {
    const Index d = sphere_dim + 1;
    return sampled(
        [d](double t) {
          Vector x = Vector::Zero(d);
          x(0) = std::cos(t);
          x(1) = std::sin(t);
          return x;
        },
        d,
        [d](double t) {
          Vector v = Vector::Zero(d);
          v(0) = -std::sin(t);
          v(1) = std::cos(t);
          return v;
        });
  }

  /// t -> x_{2 pi - t}.
  Loop reversed() const {
    Loop l = *this;
    l.kind_ = kind_ + "-reversed";
    l.pos_ = [p = pos_](double t) { return p(kTwoPi - t); };
    l.vel_ = [v = vel_](double t) { return Vector(-v(kTwoPi - t)); };
    return l;
  }

  Vector position(double t) const { return pos_(t); }
  Vector velocity(double t) const { return vel_(t); }
  Index ambient_dim() const { return ambient_; }
  double period() const { return kTwoPi; }
  std::optional<double> radius() const { return radius_; }
  const std::string& kind() const { return kind_; }

 private:
  Loop() = default;

  void validate() const {
    for (int k = 0; k <= 16; ++k) {
      const double t = kTwoPi * k / 16.0;
      const Vector x = pos_(t);
      if (x.size() != ambient_) throw std::invalid_argument("loop: position has the wrong dimension");
      if (std::abs(x.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("loop: positions must be unit vectors");
    }
    if ((pos_(0.0) - pos_(kTwoPi)).norm() > 1e-12) throw std::invalid_argument("loop: curve is not closed");
  }

  Index ambient_ = 0;
  std::optional<double> radius_;
  std::string kind_;
  Curve pos_;
  Curve vel_;
};

namespace detail {

// Second derivatives of the periodic cubic spline through equally spaced y_k.
inline Matrix periodic_spline_moments(const Matrix& y, double h) {
  const Index n = y.cols();
  Matrix a = Matrix::Zero(n, n);
  Matrix rhs(n, y.rows());
  for (Index k = 0; k < n; ++k) {
    a(k, k) = 4.0;
    a(k, (k + 1) % n) += 1.0;
    a(k, (k + n - 1) % n) += 1.0;
    rhs.row(k) = (6.0 / (h * h)) * (y.col((k + 1) % n) - 2.0 * y.col(k) + y.col((k + n - 1) % n)).transpose();
  }
  return a.partialPivLu().solve(rhs).transpose();
}

}  // namespace detail

inline Loop Loop::sampled(const Matrix& table) {
  const Index n = table.cols();
  if (n < 4) throw std::invalid_argument("loop: a sampled table needs at least 4 points");
  for (Index k = 0; k < n; ++k)
    if (std::abs(table.col(k).norm() - 1.0) > 1e-12)
      throw std::invalid_argument("loop: positions must be unit vectors");
  const double h = kTwoPi / static_cast<double>(n);
  auto m = std::make_shared<const Matrix>(detail::periodic_spline_moments(table, h));
  auto y = std::make_shared<const Matrix>(table);
  // value and derivative of the raw spline at t
  auto eval = [m, y, h, n](double t) {
    double u = std::fmod(t, kTwoPi);
    if (u < 0) u += kTwoPi;
    Index k = std::min<Index>(static_cast<Index>(u / h), n - 1);
    const double a = (static_cast<double>(k + 1) * h - u) / h, b = 1.0 - a;
    const Index k1 = (k + 1) % n;
    Vector val = a * y->col(k) + b * y->col(k1) +
                 ((a * a * a - a) * m->col(k) + (b * b * b - b) * m->col(k1)) * (h * h / 6.0);
    Vector der = (y->col(k1) - y->col(k)) / h +
                 (-(3 * a * a - 1) * m->col(k) + (3 * b * b - 1) * m->col(k1)) * (h / 6.0);
    return std::pair<Vector, Vector>{val, der};
  };
  Loop l;
  l.ambient_ = table.rows();
  l.kind_ = "sampled-table";
  l.pos_ = [eval](double t) { return Vector(eval(t).first.normalized()); };
  l.vel_ = [eval](double t) {
    auto [p, dp] = eval(t);
    const double len = p.norm();
    const Vector u = p / len;
    return Vector((dp - u.dot(dp) * u) / len);
  };
  l.validate();
  return l;
}

struct TransportResult {
  Matrix matrix;               ///< columns: transported frame vectors
  std::vector<Vector> vectors;
  double ortho_drift = 0.0;    ///< max |Gram(end) - Gram(start)|
  double tangency_drift = 0.0; ///< max |<X_t, x_t>| before reprojection
  int steps = 0;
};

/// Transports the columns of `x0` along the loop from t = 0 to t_end.
inline TransportResult transport_columns(const Loop& loop, const Matrix& x0, int steps = kDefaultSteps,
                                         std::optional<double> t_end = std::nullopt) {
  if (steps < 100) throw std::invalid_argument("transport: at least 100 steps are required");
  if (x0.rows() != loop.ambient_dim()) throw std::invalid_argument("transport: dimension mismatch");
  const Vector p0 = loop.position(0.0);
  for (Index j = 0; j < x0.cols(); ++j)
    if (std::abs(p0.dot(x0.col(j))) > 1e-10 * std::max(1.0, x0.col(j).norm()))
      throw std::invalid_argument("transport: initial vector is not tangent at x_0");

  const double t1 = t_end.value_or(loop.period());
  const double h = t1 / steps;
  const auto rhs = [&](double t, const Matrix& x) -> Matrix {
    const Vector p = loop.position(t), v = loop.velocity(t);
    return -p * (v.transpose() * x);
  };
  TransportResult res;
  res.steps = steps;
  Matrix x = x0;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Matrix k1 = rhs(t, x);
    const Matrix k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
    const Matrix k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
    const Matrix k4 = rhs(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const Vector p = loop.position(t + h);
    const Eigen::RowVectorXd normal = p.transpose() * x;
    if (normal.size() > 0) res.tangency_drift = std::max(res.tangency_drift, normal.cwiseAbs().maxCoeff());
    x -= p * normal;
  }
  if (x.cols() > 0)
    res.ortho_drift = (x.transpose() * x - x0.transpose() * x0).cwiseAbs().maxCoeff();
  res.matrix = x;
  for (Index j = 0; j < x.cols(); ++j) res.vectors.push_back(x.col(j));
  return res;
}

inline Vector transport_vector(const Loop& loop, const Vector& x0, int steps = kDefaultSteps,
                               std::optional<double> t_end = std::nullopt) {
  return transport_columns(loop, x0, steps, t_end).vectors.front();
}

/// Transports an orthonormal tangent frame at x_0 once around the loop.
inline TransportResult transport_frame(const Loop& loop, const SubspaceBasis& frame,
                                       int steps = kDefaultSteps) {
  if (frame.orthonormality_defect() > 1e-10)
    throw std::invalid_argument("transport_frame: frame is not orthonormal");
  return transport_columns(loop, frame.matrix(), steps);
}

/// Transport of X_0 = (0, r, 0, ...) along the circle loop, in closed form
/// (7 coordinates for S^6, 8 for S^7).
inline Vector closed_form_X(double r, double t, int sphere_dim = 6) {
  const double s = detail::circle_s(r);
  if (sphere_dim != 6 && sphere_dim != 7) throw std::invalid_argument("closed_form_X: sphere dimension must be 6 or 7");
  const double r3 = r * r * r, p = 1.0 + s, m = 1.0 - s;
  Vector x = Vector::Zero(sphere_dim + 1);
  x(0) = -r3 * std::sin(p * t) / (2 * p) - r3 * std::sin(m * t) / (2 * m);
  x(1) = r3 * std::cos(p * t) / (2 * p) + r3 * std::cos(m * t) / (2 * m);
  x(3) = -r * r * std::sin(s * t);
  return x;
}

/// Y_0 = (0, 0, r^2, 0, 0, -r sqrt(1 - r^2), 0, ...), constant along the circle loop.
inline Vector closed_form_Y(double r, int sphere_dim = 6) {
  const double s = detail::circle_s(r);
  Vector y = Vector::Zero(sphere_dim + 1);
  y(2) = r * r;
  y(5) = -r * s;
  return y;
}

/// Transport of Z_0 along the circle loop on S^7, in closed form.
inline Vector closed_form_Z(double r, double t) {
  const double s = detail::circle_s(r);
  const double r2 = r * r, r3 = r2 * r, r5 = r3 * r2, p = 1.0 + s, m = 1.0 - s;
  Vector z = Vector::Zero(8);
  z(0) = r5 * std::cos(p * t) / (2 * p) - r5 * std::cos(m * t) / (2 * m);
  z(1) = r5 * std::sin(p * t) / (2 * p) - r5 * std::sin(m * t) / (2 * m);
  z(3) = r2 * r2 * std::cos(s * t);
  z(4) = r3 * s;
  z(7) = r2 * (1 - r2);
  return z;
}

}  // namespace holoforge
