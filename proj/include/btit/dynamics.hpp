#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace btit::dynamics {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Arrival-time search interval. The Gramian is near-singular as tau -> 0, so
// the search never goes below kTauMin.
inline constexpr double kTauMin = 1e-3;
inline constexpr double kTauCap = 50.0;
inline constexpr int kTauGridPoints = 64;
inline constexpr double kTauRefineTolerance = 1e-6;
inline constexpr double kMaxGramianCondition = 1e12;
inline constexpr double kGramianOdeTolerance = 1e-10;

/// Time-invariant affine system  xdot = A x + B u + c  with running cost
/// 1 + u^T R u.
class LinearSystem
{
public:
  LinearSystem(Matrix A, Matrix B, Vector c, Matrix R, std::string name = {});

  const Matrix& A() const noexcept { return A_; }
  const Matrix& B() const noexcept { return B_; }
  const Vector& c() const noexcept { return c_; }
  const Matrix& R() const noexcept { return R_; }
  const Matrix& R_inverse() const noexcept { return R_inv_; }
  // B R^-1 B^T
  const Matrix& input_weight() const noexcept { return input_weight_; }
  const std::string& name() const noexcept { return name_; }

  int state_dim() const noexcept { return static_cast<int>(A_.rows()); }
  int control_dim() const noexcept { return static_cast<int>(B_.cols()); }

  // Smallest k with A^k == 0 exactly, or 0 when A is not (exactly) nilpotent.
  int nilpotency_index() const noexcept { return nilpotency_index_; }
  bool nilpotent() const noexcept { return nilpotency_index_ > 0; }

  // A^i / i! for i < k (nilpotent systems only).
  const std::vector<Matrix>& exp_terms() const noexcept { return exp_terms_; }
  // G(t) = sum_p t^(p+1) gramian_terms()[p]  (nilpotent systems only).
  const std::vector<Matrix>& gramian_terms() const noexcept { return gramian_terms_; }

private:
  Matrix A_, B_;
  Vector c_;
  Matrix R_, R_inv_, input_weight_;
  std::string name_;
  int nilpotency_index_ = 0;
  std::vector<Matrix> exp_terms_;
  std::vector<Matrix> gramian_terms_;
};

struct SteeringResult
{
  double tau_star = 0.0;
  double cost = 0.0;
  Vector x0;
  Vector x1;
  // G(tau*)^-1 (x1 - xbar(tau*))
  Vector d_vec;
};

struct TrajectorySamples
{
  std::vector<Vector> states;
  std::vector<double> times;
};

Matrix mat_exp(const Matrix& A, double t);

/// Weighted controllability Gramian
///   G(t) = int_0^t e^{A(t-s)} B R^-1 B^T e^{A^T(t-s)} ds.
/// Exact polynomial for nilpotent A, adaptive RK4 on the Lyapunov ODE
/// otherwise.
Matrix gramian(const LinearSystem& sys, double t);

/// Free response e^{At} x0 + int_0^t e^{A(t-s)} c ds.
Vector drift(const LinearSystem& sys, const Vector& x0, double t);

/// Minimal cost of reaching x1 from x0 in exactly tau seconds, ignoring
/// obstacles. Throws SingularGramianError when G(tau) cannot be inverted.
double steer_cost(const LinearSystem& sys, const Vector& x0, const Vector& x1, double tau);

/// Optimal arrival time over [kTauMin, tau_max] and the resulting cost.
SteeringResult steer(const LinearSystem& sys, const Vector& x0, const Vector& x1, double tau_max);

/// Same as steer() but with the arrival time fixed.
SteeringResult steer_fixed_time(const LinearSystem& sys, const Vector& x0, const Vector& x1, double tau);

Vector state_at(const LinearSystem& sys, const SteeringResult& sr, double t);
Vector control_at(const LinearSystem& sys, const SteeringResult& sr, double t);

/// S+1 states at uniform times i * tau* / S.
TrajectorySamples synthesize(const LinearSystem& sys, const SteeringResult& sr, int segments);

/// Upper end of the arrival-time search for a pair:
/// min(kTauCap, 2 |x1 - x0| + 1) seconds.
double default_tau_max(const Vector& x0, const Vector& x1);

/// Reusable steering workspace bound to one system. Holds scratch buffers, so
/// one instance must not be shared between threads.
class Steerer
{
public:
  explicit Steerer(LinearSystem sys);

  const LinearSystem& system() const noexcept { return sys_; }

  double cost(const Vector& x0, const Vector& x1, double tau);
  SteeringResult steer(const Vector& x0, const Vector& x1, double tau_max);
  SteeringResult steer(const Vector& x0, const Vector& x1)
  {
    return steer(x0, x1, default_tau_max(x0, x1));
  }
  SteeringResult fixed_time(const Vector& x0, const Vector& x1, double tau);

  // Trajectory state at time t of an already computed steering result.
  void state_at(const SteeringResult& sr, double t, Vector& out);
  // Second time derivative of the trajectory at t, given its state x there.
  void second_derivative(const SteeringResult& sr, double t, const Vector& x, Vector& out);

  // Number of cost-function evaluations performed so far.
  std::uint64_t evaluations() const noexcept { return evaluations_; }

private:
  void bind(const Vector& x0, const Vector& x1);
  // Cost at tau for the bound pair; false when G(tau) is singular.
  bool evaluate(double tau, double& cost);
  void fill_gramian(double t, Matrix& G) const;
  void fill_drift(double t, Vector& xbar) const;

  LinearSystem sys_;
  std::uint64_t evaluations_ = 0;

  Vector x0_, x1_;
  std::vector<Vector> drift_terms_;
  // Nilpotent systems: structurally nonzero lower-triangle entries of G and
  // their polynomial coefficients, gram_order_ per entry.
  std::vector<std::pair<int, int>> gram_entries_;
  std::vector<double> gram_coeffs_;
  int gram_order_ = 0;
  Matrix G_;
  Vector xbar_, residual_, d_;
  Matrix scratch_m_;
  Vector scratch_v_;
  // Second derivative: u = K w, u' = -K A^T w.
  Matrix gain_, gain_rate_;
  Vector costate_, x_dot_;
};

// System presets.
LinearSystem double_integrator(int axes, double control_weight = 1.0);
LinearSystem linearized_quadrotor();
LinearSystem single_integrator(int axes, double control_weight = 1.0);
// "dir4d", "lq10d", "si2d", "di1d"
LinearSystem system_preset(const std::string& name);
std::vector<std::string> system_preset_names();

}  // namespace btit::dynamics
