#include "btit/sampling.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "btit/errors.hpp"

namespace btit::sampling {

Rng batch_stream(std::uint64_t root_seed, std::uint64_t batch_index)
{
  std::seed_seq seq{static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32),
                    static_cast<std::uint32_t>(batch_index),
                    static_cast<std::uint32_t>(batch_index >> 32), 0x62746974u};
  return Rng(seq);
}

double standard_normal(Rng& rng) noexcept
{
  // Box-Muller; one value per call keeps the stream position predictable.
  double u1 = uniform01(rng);
  while (u1 <= 0.0)
    u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

void draw_in_bounds(const Scenario& scn, Rng& rng, Vector& x)
{
  const auto& ws = scn.workspace;
  x.resize(ws.dim());
  for (int i = 0; i < ws.dim(); ++i)
    x[i] = ws.lower[i] + (ws.upper[i] - ws.lower[i]) * uniform01(rng);
}

}  // namespace

Vector sample_uniform(const Scenario& scn, Rng& rng)
{
  Vector x;
  for (std::uint64_t tries = 0; tries < kMaxConsecutiveRejections; ++tries) {
    draw_in_bounds(scn, rng, x);
    if (geometry::state_valid(scn, x.data()))
      return x;
  }
  throw InfeasibleSpaceError("sample_uniform: no collision-free state after 1e6 draws");
}

SampleBatch informed_sample(const Scenario& scn, std::size_t m, double c_best, Rng& rng,
                            const CostEstimator& estimate, std::uint64_t batch_index,
                            const std::function<bool()>& should_stop)
{
  if (m < 1)
    throw PreconditionError("informed_sample: m must be >= 1");
  const bool focused = std::isfinite(c_best);
  if (focused && !estimate)
    throw PreconditionError("informed_sample: a finite c_best needs a cost estimator");

  SampleBatch batch;
  batch.batch_index = batch_index;
  batch.states.reserve(m);
  const std::uint64_t cap = kRejectionsPerSample * m;
  std::uint64_t rejected = 0;
  while (batch.states.size() < m) {
    if (rejected > cap || (should_stop && should_stop())) {
      batch.truncated = true;
      break;
    }
    Vector x = sample_uniform(scn, rng);
    ++batch.draws;
    if (!estimate) {
      batch.states.push_back(std::move(x));
      continue;
    }
    const CostEstimate e = estimate(x);
    if (focused && !in_informed_set(e, c_best)) {
      ++rejected;
      continue;
    }
    batch.states.push_back(std::move(x));
    batch.estimates.push_back(e);
  }
  return batch;
}

double position_distance(const Scenario& scn, const Vector& a, const Vector& b)
{
  double s = 0.0;
  for (int d : scn.workspace.position_dims) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return std::sqrt(s);
}

SampleBatch informed_sample_phs(const Scenario& scn, std::size_t m, double c_best, Rng& rng,
                                std::uint64_t batch_index, const std::function<bool()>& should_stop)
{
  if (m < 1)
    throw PreconditionError("informed_sample_phs: m must be >= 1");
  if (!std::isfinite(c_best))
    return informed_sample(scn, m, c_best, rng, {}, batch_index, should_stop);

  const auto& pd = scn.workspace.position_dims;
  const auto k = static_cast<Eigen::Index>(pd.size());
  Vector focus_a(k), focus_b(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    focus_a[i] = scn.start[pd[i]];
    focus_b[i] = scn.goal[pd[i]];
  }
  const double c_min = (focus_b - focus_a).norm();

  SampleBatch batch;
  batch.batch_index = batch_index;
  if (!(c_best > c_min)) {
    batch.truncated = true;
    return batch;
  }

  // Rotation taking the first axis onto the focal direction.
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(k, k);
  if (c_min > 0.0) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, k);
    M.col(0) = (focus_b - focus_a) / c_min;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(k);
    w[k - 1] = svd.matrixU().determinant() * svd.matrixV().determinant();
    C = svd.matrixU() * w.asDiagonal() * svd.matrixV().transpose();
  }
  Eigen::VectorXd radii = Eigen::VectorXd::Constant(k, 0.5 * std::sqrt(c_best * c_best - c_min * c_min));
  radii[0] = 0.5 * c_best;
  const Vector centre = 0.5 * (focus_a + focus_b);

  const std::uint64_t cap = kRejectionsPerSample * m;
  std::uint64_t rejected = 0;
  Vector x;
  Vector ball(k);
  while (batch.states.size() < m) {
    if (rejected > cap || (should_stop && should_stop())) {
      batch.truncated = true;
      break;
    }
    // Uniform in the unit k-ball.
    for (Eigen::Index i = 0; i < k; ++i)
      ball[i] = standard_normal(rng);
    ball *= std::pow(uniform01(rng), 1.0 / static_cast<double>(k)) / ball.norm();
    const Vector p = C * radii.cwiseProduct(ball) + centre;
    draw_in_bounds(scn, rng, x);
    for (Eigen::Index i = 0; i < k; ++i)
      x[pd[i]] = p[i];
    ++batch.draws;
    if (!geometry::state_valid(scn, x.data())) {
      ++rejected;
      continue;
    }
    batch.states.push_back(x);
  }
  return batch;
}

}  // namespace btit::sampling
