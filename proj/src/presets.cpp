#include <string>
#include <vector>

#include "btit/dynamics.hpp"
#include "btit/errors.hpp"

namespace btit::dynamics {

namespace {

// Linearized quadrotor about hover. Mass and inertia are those of a small
// research airframe.
constexpr double kGravity = 9.81;
constexpr double kQuadMass = 0.5;       // kg
constexpr double kQuadInertia = 0.1;    // kg m^2, roll and pitch axes

}  // namespace

LinearSystem double_integrator(int axes, double control_weight)
{
  if (axes < 1)
    throw PreconditionError("double_integrator: axes must be >= 1");
  const int n = 2 * axes;
  Matrix A = Matrix::Zero(n, n);
  A.topRightCorner(axes, axes).setIdentity();
  Matrix B = Matrix::Zero(n, axes);
  B.bottomRows(axes).setIdentity();
  return LinearSystem(A, B, Vector::Zero(n), control_weight * Matrix::Identity(axes, axes),
                      "double_integrator_" + std::to_string(axes));
}

LinearSystem single_integrator(int axes, double control_weight)
{
  if (axes < 1)
    throw PreconditionError("single_integrator: axes must be >= 1");
  return LinearSystem(Matrix::Zero(axes, axes), Matrix::Identity(axes, axes), Vector::Zero(axes),
                      control_weight * Matrix::Identity(axes, axes),
                      "single_integrator_" + std::to_string(axes));
}

LinearSystem linearized_quadrotor()
{
  // x = [p(3) v(3) r(2) w(2)], r = (roll, pitch), u = (thrust offset, roll
  // torque, pitch torque).
  Matrix A = Matrix::Zero(10, 10);
  A.block(0, 3, 3, 3).setIdentity();
  A(3, 7) = kGravity;   // vx' =  g * pitch
  A(4, 6) = -kGravity;  // vy' = -g * roll
  A.block(6, 8, 2, 2).setIdentity();
  Matrix B = Matrix::Zero(10, 3);
  B(5, 0) = 1.0 / kQuadMass;
  B(8, 1) = 1.0 / kQuadInertia;
  B(9, 2) = 1.0 / kQuadInertia;
  return LinearSystem(A, B, Vector::Zero(10), Matrix::Identity(3, 3), "linearized_quadrotor");
}

LinearSystem system_preset(const std::string& name)
{
  if (name == "dir4d")
    return LinearSystem(double_integrator(2).A(), double_integrator(2).B(), Vector::Zero(4),
                        Matrix::Identity(2, 2), "dir4d");
  if (name == "lq10d") {
    auto q = linearized_quadrotor();
    return LinearSystem(q.A(), q.B(), q.c(), q.R(), "lq10d");
  }
  if (name == "si2d")
    return LinearSystem(Matrix::Zero(2, 2), Matrix::Identity(2, 2), Vector::Zero(2),
                        Matrix::Identity(2, 2), "si2d");
  if (name == "di1d") {
    auto d = double_integrator(1);
    return LinearSystem(d.A(), d.B(), d.c(), d.R(), "di1d");
  }
  throw PreconditionError("unknown system preset '" + name + "'");
}

std::vector<std::string> system_preset_names()
{
  return {"dir4d", "lq10d", "si2d", "di1d"};
}

}  // namespace btit::dynamics
