#include "btit/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "btit/errors.hpp"

namespace btit::dynamics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(const Matrix& M, const char* what)
{
  if (!M.allFinite())
    throw NumericDomainError(std::string(what) + " has non-finite entries");
}

void require_dim(const Vector& x, int n, const char* what)
{
  if (x.size() != n)
    throw PreconditionError(std::string(what) + " has dimension " + std::to_string(x.size()) +
                            ", expected " + std::to_string(n));
}

int find_nilpotency_index(const Matrix& A)
{
  const int n = static_cast<int>(A.rows());
  if (A.isZero(0.0))
    return 1;
  Matrix P = A;
  for (int k = 2; k <= n; ++k) {
    P = P * A;
    if ((P.array() == 0.0).all())
      return k;
  }
  return 0;
}

double factorial(int k)
{
  double f = 1.0;
  for (int i = 2; i <= k; ++i)
    f *= i;
  return f;
}

Matrix lyapunov_rhs(const Matrix& A, const Matrix& W, const Matrix& G)
{
  return A * G + G * A.transpose() + W;
}

Matrix rk4_step(const Matrix& A, const Matrix& W, const Matrix& G, double h)
{
  const Matrix k1 = lyapunov_rhs(A, W, G);
  const Matrix k2 = lyapunov_rhs(A, W, G + 0.5 * h * k1);
  const Matrix k3 = lyapunov_rhs(A, W, G + 0.5 * h * k2);
  const Matrix k4 = lyapunov_rhs(A, W, G + h * k3);
  return G + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Step-doubling RK4 with Richardson correction on Gdot = AG + GA^T + W.
Matrix integrate_lyapunov(const Matrix& A, const Matrix& W, double t)
{
  const int n = static_cast<int>(A.rows());
  Matrix G = Matrix::Zero(n, n);
  if (t == 0.0)
    return G;
  double s = 0.0;
  double h = t / 16.0;
  int guard = 0;
  while (s < t) {
    if (++guard > 10'000'000)
      throw NumericDomainError("gramian ODE integration did not converge");
    h = std::min(h, t - s);
    const Matrix full = rk4_step(A, W, G, h);
    const Matrix half = rk4_step(A, W, rk4_step(A, W, G, 0.5 * h), 0.5 * h);
    const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
    const double scale = 1.0 + half.cwiseAbs().maxCoeff();
    const double tol = kGramianOdeTolerance * scale;
    if (!std::isfinite(err))
      throw NumericDomainError("gramian ODE integration overflowed");
    if (err <= tol) {
      G = half + (half - full) / 15.0;
      s += h;
      const double grow = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 2.0;
      h *= std::clamp(grow, 1.0, 2.0);
    } else {
      h *= std::clamp(0.9 * std::pow(tol / err, 0.2), 0.1, 0.9);
    }
  }
  return 0.5 * (G + G.transpose());
}

}  // namespace

LinearSystem::LinearSystem(Matrix A, Matrix B, Vector c, Matrix R, std::string name)
  : A_(std::move(A)), B_(std::move(B)), c_(std::move(c)), R_(std::move(R)), name_(std::move(name))
{
  const auto n = A_.rows();
  if (n == 0 || A_.cols() != n)
    throw PreconditionError("A must be a nonempty square matrix");
  if (B_.rows() != n || B_.cols() == 0)
    throw PreconditionError("B must have " + std::to_string(n) + " rows and at least one column");
  if (c_.size() != n)
    throw PreconditionError("drift vector c must have dimension " + std::to_string(n));
  const auto m = B_.cols();
  if (R_.rows() != m || R_.cols() != m)
    throw PreconditionError("R must be " + std::to_string(m) + "x" + std::to_string(m));
  require_finite(A_, "A");
  require_finite(B_, "B");
  require_finite(c_, "c");
  require_finite(R_, "R");
  if (!R_.isApprox(R_.transpose(), 1e-12))
    throw PreconditionError("R must be symmetric");
  Eigen::LLT<Matrix> llt(R_);
  if (llt.info() != Eigen::Success)
    throw PreconditionError("R must be positive definite");

  R_inv_ = llt.solve(Matrix::Identity(m, m));
  input_weight_ = B_ * R_inv_ * B_.transpose();
  input_weight_ = (0.5 * (input_weight_ + input_weight_.transpose())).eval();

  nilpotency_index_ = find_nilpotency_index(A_);
  const int k = nilpotency_index_;
  if (k > 0) {
    exp_terms_.reserve(k);
    Matrix P = Matrix::Identity(n, n);
    for (int i = 0; i < k; ++i) {
      exp_terms_.push_back(P / factorial(i));
      P = P * A_;
    }
    // int_0^t E(s) W E(s)^T ds with E(s) = sum_i s^i A^i / i!
    gramian_terms_.assign(2 * k - 1, Matrix::Zero(n, n));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        gramian_terms_[i + j] += exp_terms_[i] * input_weight_ * exp_terms_[j].transpose();
    for (int p = 0; p < 2 * k - 1; ++p) {
      Matrix& C = gramian_terms_[p];
      C = (0.5 * (C + C.transpose()) / static_cast<double>(p + 1)).eval();
    }
  }
}

Matrix mat_exp(const Matrix& A, double t)
{
  if (!std::isfinite(t))
    throw NumericDomainError("mat_exp: non-finite time");
  require_finite(A, "mat_exp: A");
  if (A.rows() != A.cols())
    throw PreconditionError("mat_exp: A must be square");
  const auto n = A.rows();
  Matrix result;
  if (const int k = find_nilpotency_index(A); k > 0) {
    result = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int i = 1; i < k; ++i) {
      term = term * A * (t / i);
      result += term;
    }
  } else {
    result = (A * t).exp();
  }
  if (!result.allFinite())
    throw NumericDomainError("mat_exp: overflow");
  return result;
}

Matrix gramian(const LinearSystem& sys, double t)
{
  if (!(t >= 0.0) || !std::isfinite(t))
    throw PreconditionError("gramian: t must be finite and >= 0");
  const int n = sys.state_dim();
  if (t == 0.0)
    return Matrix::Zero(n, n);
  if (!sys.nilpotent())
    return integrate_lyapunov(sys.A(), sys.input_weight(), t);
  const auto& terms = sys.gramian_terms();
  Matrix G = terms.back();
  for (int p = static_cast<int>(terms.size()) - 2; p >= 0; --p)
    G = G * t + terms[p];
  G *= t;
  return G;
}

Vector drift(const LinearSystem& sys, const Vector& x0, double t)
{
  require_dim(x0, sys.state_dim(), "drift: x0");
  if (!(t >= 0.0) || !std::isfinite(t))
    throw PreconditionError("drift: t must be finite and >= 0");
  const int n = sys.state_dim();
  if (sys.nilpotent()) {
    const auto& E = sys.exp_terms();
    Vector x = Vector::Zero(n);
    double tp = 1.0;
    for (std::size_t i = 0; i < E.size(); ++i) {
      x += tp * (E[i] * x0);
      // int_0^t s^i/i! ds = t^(i+1)/(i+1)!
      x += (tp * t / static_cast<double>(i + 1)) * (E[i] * sys.c());
      tp *= t;
    }
    if (!x.allFinite())
      throw NumericDomainError("drift: overflow");
    return x;
  }
  // [[A c],[0 0]] augmented exponential carries the drift integral.
  Matrix aug = Matrix::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = sys.A();
  aug.topRightCorner(n, 1) = sys.c();
  const Matrix E = mat_exp(aug, t);
  return E.topLeftCorner(n, n) * x0 + E.topRightCorner(n, 1);
}

double default_tau_max(const Vector& x0, const Vector& x1)
{
  const double d = (x1 - x0).norm();
  return std::clamp(2.0 * d + 1.0, 2.0 * kTauMin, kTauCap);
}

// ---------------------------------------------------------------------------

Steerer::Steerer(LinearSystem sys) : sys_(std::move(sys))
{
  const int n = sys_.state_dim();
  G_.resize(n, n);
  scratch_m_.resize(n, n);
  xbar_.resize(n);
  residual_.resize(n);
  d_.resize(n);
  scratch_v_.resize(n);
  gain_ = sys_.R_inverse() * sys_.B().transpose();
  gain_rate_ = -(gain_ * sys_.A().transpose());
  costate_.resize(n);
  x_dot_.resize(n);
  x0_ = Vector::Zero(n);
  x1_ = Vector::Zero(n);
  if (sys_.nilpotent()) {
    drift_terms_.assign(sys_.nilpotency_index() + 1, Vector::Zero(n));
    const auto& terms = sys_.gramian_terms();
    gram_order_ = static_cast<int>(terms.size());
    for (int j = 0; j < n; ++j)
      for (int i = j; i < n; ++i) {
        bool nonzero = false;
        for (const auto& T : terms)
          nonzero = nonzero || T(i, j) != 0.0;
        if (!nonzero)
          continue;
        gram_entries_.emplace_back(i, j);
        for (const auto& T : terms)
          gram_coeffs_.push_back(T(i, j));
      }
    G_.setZero();
  }
}

void Steerer::bind(const Vector& x0, const Vector& x1)
{
  const int n = sys_.state_dim();
  require_dim(x0, n, "steer: x0");
  require_dim(x1, n, "steer: x1");
  if (!x0.allFinite() || !x1.allFinite())
    throw NumericDomainError("steer: non-finite state");
  x0_ = x0;
  x1_ = x1;
  if (sys_.nilpotent()) {
    // xbar(t) = sum_p t^p v_p,  v_p = E_p x0 + E_{p-1} c / p
    const auto& E = sys_.exp_terms();
    const int k = sys_.nilpotency_index();
    for (int p = 0; p <= k; ++p) {
      Vector& v = drift_terms_[p];
      v.setZero();
      if (p < k)
        v.noalias() += E[p] * x0;
      if (p >= 1)
        v.noalias() += E[p - 1] * sys_.c() / static_cast<double>(p);
    }
  }
}

void Steerer::fill_gramian(double t, Matrix& G) const
{
  if (!sys_.nilpotent()) {
    G = gramian(sys_, t);
    return;
  }
  if (G.rows() != sys_.state_dim() || G.cols() != sys_.state_dim())
    G.setZero(sys_.state_dim(), sys_.state_dim());
  const double* c = gram_coeffs_.data();
  for (const auto& [i, j] : gram_entries_) {
    double v = c[gram_order_ - 1];
    for (int p = gram_order_ - 2; p >= 0; --p)
      v = v * t + c[p];
    G(i, j) = G(j, i) = v * t;
    c += gram_order_;
  }
}

void Steerer::fill_drift(double t, Vector& xbar) const
{
  if (!sys_.nilpotent()) {
    xbar = drift(sys_, x0_, t);
    return;
  }
  xbar = drift_terms_.back();
  for (int p = static_cast<int>(drift_terms_.size()) - 2; p >= 0; --p) {
    xbar *= t;
    xbar += drift_terms_[p];
  }
}

bool Steerer::evaluate(double tau, double& cost)
{
  ++evaluations_;
  fill_gramian(tau, G_);
  fill_drift(tau, xbar_);
  residual_ = x1_ - xbar_;
  // Cholesky of the lower triangle, then two triangular solves.
  const int n = static_cast<int>(G_.rows());
  scratch_m_ = G_;
  double* L = scratch_m_.data();
  double lo = kInf, hi = 0.0;
  for (int j = 0; j < n; ++j) {
    double s = L[j + j * n];
    for (int k = 0; k < j; ++k)
      s -= L[j + k * n] * L[j + k * n];
    if (!(s > 0.0)) {
      cost = kInf;
      return false;
    }
    const double ljj = std::sqrt(s);
    L[j + j * n] = ljj;
    lo = std::min(lo, ljj);
    hi = std::max(hi, ljj);
    for (int i = j + 1; i < n; ++i) {
      double v = L[i + j * n];
      for (int k = 0; k < j; ++k)
        v -= L[i + k * n] * L[j + k * n];
      L[i + j * n] = v / ljj;
    }
  }
  // (max L_ii / min L_ii)^2 bounds cond(G) from below.
  if (!(hi * hi <= kMaxGramianCondition * lo * lo)) {
    cost = kInf;
    return false;
  }
  double* y = d_.data();
  for (int i = 0; i < n; ++i) {
    double v = residual_[i];
    for (int k = 0; k < i; ++k)
      v -= L[i + k * n] * y[k];
    y[i] = v / L[i + i * n];
  }
  for (int i = n - 1; i >= 0; --i) {
    double v = y[i];
    for (int k = i + 1; k < n; ++k)
      v -= L[k + i * n] * y[k];
    y[i] = v / L[i + i * n];
  }
  cost = tau + residual_.dot(d_);
  if (!std::isfinite(cost)) {
    cost = kInf;
    return false;
  }
  return true;
}

double Steerer::cost(const Vector& x0, const Vector& x1, double tau)
{
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw PreconditionError("steer_cost: tau must be finite and > 0");
  bind(x0, x1);
  double c = kInf;
  if (!evaluate(tau, c))
    throw SingularGramianError("steer_cost: Gramian is singular or ill-conditioned at tau=" +
                               std::to_string(tau));
  return c;
}

SteeringResult Steerer::fixed_time(const Vector& x0, const Vector& x1, double tau)
{
  const double c = cost(x0, x1, tau);
  return SteeringResult{tau, c, x0, x1, d_};
}

SteeringResult Steerer::steer(const Vector& x0, const Vector& x1, double tau_max)
{
  if (!(tau_max > kTauMin) || !std::isfinite(tau_max))
    throw PreconditionError("steer: tau_max must be finite and > tau_min");
  bind(x0, x1);

  // Logarithmic bracket, then golden-section refinement around the best point.
  std::array<double, kTauGridPoints> taus{};
  std::array<double, kTauGridPoints> costs{};
  const double ratio = std::log(tau_max / kTauMin);
  int best = -1;
  for (int i = 0; i < kTauGridPoints; ++i) {
    taus[i] = i + 1 == kTauGridPoints
                ? tau_max
                : kTauMin * std::exp(ratio * static_cast<double>(i) / (kTauGridPoints - 1));
    evaluate(taus[i], costs[i]);
    if (std::isfinite(costs[i]) && (best < 0 || costs[i] < costs[best]))
      best = i;
  }
  if (best < 0)
    throw UnsteerablePairError("steer: Gramian singular for every candidate arrival time");

  double best_tau = taus[best];
  double best_cost = costs[best];
  double a = taus[std::max(best - 1, 0)];
  double b = taus[std::min(best + 1, kTauGridPoints - 1)];
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = kInf, fd = kInf;
  evaluate(c, fc);
  evaluate(d, fd);
  while (b - a > kTauRefineTolerance * 0.5 * (a + b)) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      evaluate(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      evaluate(d, fd);
    }
    if (fc < best_cost) {
      best_cost = fc;
      best_tau = c;
    }
    if (fd < best_cost) {
      best_cost = fd;
      best_tau = d;
    }
  }

  double final_cost = kInf;
  evaluate(best_tau, final_cost);
  return SteeringResult{best_tau, final_cost, x0, x1, d_};
}

void Steerer::state_at(const SteeringResult& sr, double t, Vector& out)
{
  // x(t) = xbar(t) + G(t) e^{A^T (tau - t)} d
  if (sr.x0.size() != x0_.size() || sr.x0 != x0_)
    bind(sr.x0, sr.x1);
  fill_drift(t, xbar_);
  if (t <= 0.0) {
    out = xbar_;
    return;
  }
  fill_gramian(t, G_);
  const double back = sr.tau_star - t;
  if (sys_.nilpotent()) {
    const auto& E = sys_.exp_terms();
    scratch_v_.setZero();
    double bp = 1.0;
    for (const auto& Ei : E) {
      scratch_v_.noalias() += bp * (Ei.transpose() * sr.d_vec);
      bp *= back;
    }
  } else {
    scratch_v_ = mat_exp(sys_.A().transpose(), back) * sr.d_vec;
  }
  out = xbar_;
  out.noalias() += G_ * scratch_v_;
}

void Steerer::second_derivative(const SteeringResult& sr, double t, const Vector& x, Vector& out)
{
  // With w = e^{A^T (tau - t)} d: u = R^-1 B^T w and u' = -R^-1 B^T A^T w.
  const double back = sr.tau_star - t;
  if (sys_.nilpotent()) {
    costate_.setZero();
    double bp = 1.0;
    for (const auto& Ei : sys_.exp_terms()) {
      costate_.noalias() += bp * (Ei.transpose() * sr.d_vec);
      bp *= back;
    }
  } else {
    costate_ = mat_exp(sys_.A().transpose(), back) * sr.d_vec;
  }
  x_dot_ = sys_.c();
  x_dot_.noalias() += sys_.A() * x;
  x_dot_.noalias() += sys_.B() * (gain_ * costate_);
  out.resize(x.size());
  out.noalias() = sys_.A() * x_dot_;
  out.noalias() += sys_.B() * (gain_rate_ * costate_);
}

// ---------------------------------------------------------------------------

double steer_cost(const LinearSystem& sys, const Vector& x0, const Vector& x1, double tau)
{
  Steerer s(sys);
  return s.cost(x0, x1, tau);
}

SteeringResult steer(const LinearSystem& sys, const Vector& x0, const Vector& x1, double tau_max)
{
  Steerer s(sys);
  return s.steer(x0, x1, tau_max);
}

SteeringResult steer_fixed_time(const LinearSystem& sys, const Vector& x0, const Vector& x1, double tau)
{
  Steerer s(sys);
  return s.fixed_time(x0, x1, tau);
}

Vector state_at(const LinearSystem& sys, const SteeringResult& sr, double t)
{
  Steerer s(sys);
  Vector out;
  s.state_at(sr, t, out);
  return out;
}

Vector control_at(const LinearSystem& sys, const SteeringResult& sr, double t)
{
  // u(t) = R^-1 B^T e^{A^T (tau - t)} d
  const Matrix E = mat_exp(sys.A().transpose(), sr.tau_star - t);
  return sys.R_inverse() * sys.B().transpose() * (E * sr.d_vec);
}

TrajectorySamples synthesize(const LinearSystem& sys, const SteeringResult& sr, int segments)
{
  if (segments < 1)
    throw PreconditionError("synthesize: segments must be >= 1");
  require_dim(sr.x0, sys.state_dim(), "synthesize: x0");
  require_dim(sr.x1, sys.state_dim(), "synthesize: x1");
  Steerer s(sys);
  TrajectorySamples out;
  out.states.resize(segments + 1);
  out.times.resize(segments + 1);
  for (int i = 0; i <= segments; ++i) {
    const double t = sr.tau_star * (static_cast<double>(i) / segments);
    out.times[i] = t;
    s.state_at(sr, t, out.states[i]);
  }
  return out;
}

}  // namespace btit::dynamics
