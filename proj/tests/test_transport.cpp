#include "holoforge/transport.hpp"
#include "holoforge/structures.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace holoforge;
using namespace holoforge::test;

namespace {

constexpr double kPi = std::numbers::pi;

double s_of(double r) { return std::sqrt(1.0 - r * r); }

// Error of the transported X_{2 pi} against the closed form at r = 0.6.
double x_error(int steps) {
  const double r = 0.6;
  const Vector end = transport_vector(Loop::circle(r), closed_form_X(r, 0.0), steps);
  return (end - closed_form_X(r, kTwoPi)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Loop, CircleIsUnitAndClosed) {
  for (double r : {0.2, 0.6, 0.9}) {
    const Loop l = Loop::circle(r, 7);
    EXPECT_EQ(l.ambient_dim(), 8);
    for (double t : {0.0, 1.0, 3.0, kTwoPi}) EXPECT_NEAR(l.position(t).norm(), 1.0, 1e-14);
    EXPECT_LT((l.position(0.0) - l.position(kTwoPi)).norm(), 1e-14);
    EXPECT_NEAR(l.velocity(0.7).norm(), r, 1e-14);
  }
}

TEST(Loop, RejectsBadParameters) {
  EXPECT_THROW(Loop::circle(0.0), std::invalid_argument);
  EXPECT_THROW(Loop::circle(1.0), std::invalid_argument);
  EXPECT_THROW(Loop::circle(-0.3), std::invalid_argument);
  EXPECT_THROW(Loop::circle(0.5, 5), std::invalid_argument);
  EXPECT_THROW(closed_form_X(1.2, 0.0), std::invalid_argument);
  EXPECT_THROW(closed_form_Z(0.0, 0.0), std::invalid_argument);
  // not on the unit sphere
  EXPECT_THROW(Loop::sampled([](double) { return Vector(Vector::Constant(3, 1.0)); }, 3), std::invalid_argument);
}

TEST(Loop, SampledVelocityMatchesAnalytic) {
  const Loop c = Loop::circle(0.6);
  const Loop s = Loop::sampled([c](double t) { return c.position(t); }, 7);
  for (double t : {0.3, 2.0, 5.5}) EXPECT_LT((s.velocity(t) - c.velocity(t)).norm(), 1e-9);
}

TEST(Transport, ConstantLoopIsIdentity) {
  const Loop l = Loop::constant(Vector::Unit(7, 3));
  const Vector x0 = Vector::Unit(7, 1);
  EXPECT_LT((transport_vector(l, x0, 200) - x0).norm(), 1e-15);
}

TEST(Transport, RejectsBadInput) {
  const Loop l = Loop::circle(0.6);
  EXPECT_THROW(transport_vector(l, closed_form_X(0.6, 0.0), 99), std::invalid_argument);
  EXPECT_THROW(transport_vector(l, Vector::Unit(7, 3), 1000), std::invalid_argument);
  EXPECT_THROW(transport_vector(l, Vector::Unit(8, 1), 1000), std::invalid_argument);
  Matrix bad(7, 2);
  bad << Vector::Unit(7, 1), 2 * Vector::Unit(7, 2);
  EXPECT_THROW(transport_frame(l, SubspaceBasis::from_orthonormal(bad), 1000), std::invalid_argument);
}

TEST(Transport, CircleSecondCoordinate) {
  const double r = 0.6;
  const Vector end = transport_vector(Loop::circle(r), closed_form_X(r, 0.0));
  EXPECT_NEAR(end(1), r * std::cos(2 * kPi * s_of(r)), 1e-9);
  EXPECT_NEAR(end(1), 0.1854102, 1e-7);
  EXPECT_NEAR(end.norm(), r, 1e-10);
}

TEST(Transport, YIsParallel) {
  for (double r : {0.3, 0.6, 0.85}) {
    const Vector y0 = closed_form_Y(r);
    EXPECT_NEAR(y0.norm(), r, 1e-14);
    EXPECT_LT((transport_vector(Loop::circle(r), y0, 2000) - y0).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(ClosedForm, XEndpoints) {
  const double r = 0.6;
  Vector x0 = closed_form_X(r, 0.0);
  Vector expect0 = Vector::Zero(7);
  expect0(1) = r;
  EXPECT_LT((x0 - expect0).norm(), 1e-15);
  const Vector x1 = closed_form_X(r, kTwoPi);
  EXPECT_NEAR(x1(3), -r * r * std::sin(2 * kPi * s_of(r)), 1e-14);
  EXPECT_NEAR(x1(3), 0.3423803, 1e-7);
  for (double t : {0.0, 0.9, 2.2, 4.0, kTwoPi}) {
    EXPECT_NEAR(closed_form_X(r, t).norm(), r, 1e-14);
    EXPECT_NEAR(closed_form_X(r, t).dot(Loop::circle(r).position(t)), 0.0, 1e-14);
  }
}

TEST(ClosedForm, XSolvesTransportEquation) {
  // dX/dt = -<x', X> x by central differences
  const double r = 0.45, h = 1e-5;
  const Loop l = Loop::circle(r);
  for (double t : {0.4, 1.7, 3.3, 5.9}) {
    const Vector dx = (closed_form_X(r, t + h) - closed_form_X(r, t - h)) / (2 * h);
    const Vector rhs = -l.velocity(t).dot(closed_form_X(r, t)) * l.position(t);
    EXPECT_LT((dx - rhs).cwiseAbs().maxCoeff(), 1e-9) << t;
  }
}

TEST(ClosedForm, ZSolvesTransportEquation) {
  const double r = 0.7, h = 1e-5;
  const Loop l = Loop::circle(r, 7);
  for (double t : {0.4, 2.5, 6.0}) {
    const Vector dz = (closed_form_Z(r, t + h) - closed_form_Z(r, t - h)) / (2 * h);
    const Vector rhs = -l.velocity(t).dot(closed_form_Z(r, t)) * l.position(t);
    EXPECT_LT((dz - rhs).cwiseAbs().maxCoeff(), 1e-9) << t;
    EXPECT_NEAR(closed_form_Z(r, t).dot(l.position(t)), 0.0, 1e-14);
  }
}

TEST(ClosedForm, ZInitialValue) {
  const double r = 0.6;
  const Vector z0 = closed_form_Z(r, 0.0);
  EXPECT_NEAR(z0(4), r * r * r * s_of(r), 1e-15);
  EXPECT_NEAR(z0(4), 0.1728, 1e-15);
  const Loop l = Loop::circle(r, 7);
  const Vector theta = theta_point_cross(l.position(0.0), closed_form_X(r, 0.0, 7), closed_form_Y(r, 7));
  EXPECT_LT((theta - z0).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Transport, ZMatchesClosedForm) {
  const double r = 0.6;
  const Vector end = transport_vector(Loop::circle(r, 7), closed_form_Z(r, 0.0));
  EXPECT_LT((end - closed_form_Z(r, kTwoPi)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Transport, IntermediateTimes) {
  const double r = 0.35;
  for (double t : {1.0, 3.0}) {
    const Vector v = transport_vector(Loop::circle(r), closed_form_X(r, 0.0), 20000, t);
    EXPECT_LT((v - closed_form_X(r, t)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Transport, PreservesInnerProducts) {
  std::mt19937_64 rng(51);
  const Loop l = Loop::circle(0.7);
  const Vector p0 = l.position(0.0);
  Matrix cols(7, 3);
  for (int j = 0; j < 3; ++j) {
    Vector v = gaussian(7, rng);
    cols.col(j) = v - p0.dot(v) * p0;
  }
  const Matrix gram0 = cols.transpose() * cols;
  const auto res = transport_columns(l, cols, 5000);
  EXPECT_LT((res.matrix.transpose() * res.matrix - gram0).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(res.ortho_drift, 1e-8);
  EXPECT_LT(res.tangency_drift, 1e-8);
}

TEST(Transport, FrameStaysOrthonormal) {
  std::mt19937_64 rng(52);
  const Loop l = Loop::circle(0.5, 7);
  const Vector p0 = l.position(0.0);
  Matrix cols(8, 7);
  for (int j = 0; j < 7; ++j) {
    Vector v = gaussian(8, rng);
    cols.col(j) = v - p0.dot(v) * p0;
  }
  const auto frame = orthonormalize(cols);
  ASSERT_EQ(frame.dim(), 7);
  const auto res = transport_frame(l, frame, 10000);
  EXPECT_LT((res.matrix.transpose() * res.matrix - Matrix::Identity(7, 7)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((l.position(kTwoPi).transpose() * res.matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transport, ReversedLoopUndoesTransport) {
  const double r = 0.6;
  const Loop l = Loop::circle(r);
  const Vector x0 = closed_form_X(r, 0.0);
  const Vector there = transport_vector(l, x0, 20000);
  const Vector back = transport_vector(l.reversed(), there, 20000);
  EXPECT_LT((back - x0).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Transport, GreatCircleHasTrivialHolonomy) {
  const Loop l = Loop::great_circle(6);
  std::mt19937_64 rng(53);
  const Vector p0 = l.position(0.0);
  Vector v = gaussian(7, rng);
  v -= p0.dot(v) * p0;
  EXPECT_LT((transport_vector(l, v, 5000) - v).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transport, FourthOrderConvergence) {
  const double e100 = x_error(100), e200 = x_error(200), e400 = x_error(400);
  const double ratio = e100 / e200;
  EXPECT_GE(ratio, 8.0);
  EXPECT_LE(ratio, 32.0);
  const double order = std::log2(e200 / e400);
  EXPECT_GE(order, 3.5);
  EXPECT_LE(order, 4.5);
}

TEST(Transport, SplineTableLoop) {
  const double r = 0.6;
  const Loop c = Loop::circle(r);
  Matrix table(7, 128);
  for (Index k = 0; k < 128; ++k) table.col(k) = c.position(kTwoPi * static_cast<double>(k) / 128.0);
  const Loop l = Loop::sampled(table);
  const Vector end = transport_vector(l, closed_form_X(r, 0.0), 20000);
  EXPECT_LT((end - closed_form_X(r, kTwoPi)).cwiseAbs().maxCoeff(), 1e-6);
}
