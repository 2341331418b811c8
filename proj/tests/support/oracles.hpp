#pragma once

// Test-side reference implementations. None of these call into the library's
// numeric kernels, so agreement is an independent check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "btit/graph_search.hpp"

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// e^{At} by scaling and squaring over a 60-term Taylor series.
inline Matrix taylor_exp(const Matrix& A, double t)
{
  Matrix M = A * t;
  const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5)
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  M /= std::ldexp(1.0, squarings);
  const auto n = A.rows();
  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 60; ++k) {
    term = (term * M / static_cast<double>(k)).eval();
    sum += term;
  }
  for (int i = 0; i < squarings; ++i)
    sum = (sum * sum).eval();
  return sum;
}

// Gdot = A G + G A^T + W from G(0) = 0 with fixed-step RK4.
inline Matrix lyapunov_rk4(const Matrix& A, const Matrix& W, double t, int steps)
{
  const auto n = A.rows();
  Matrix G = Matrix::Zero(n, n);
  const double h = t / steps;
  auto f = [&](const Matrix& X) -> Matrix { return A * X + X * A.transpose() + W; };
  for (int i = 0; i < steps; ++i) {
    const Matrix k1 = f(G);
    const Matrix k2 = f(G + 0.5 * h * k1);
    const Matrix k3 = f(G + 0.5 * h * k2);
    const Matrix k4 = f(G + h * k3);
    G += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return G;
}

// xdot = A x + c from x0 with fixed-step RK4.
inline Vector affine_rk4(const Matrix& A, const Vector& c, Vector x, double t, double step)
{
  const int steps = static_cast<int>(std::llround(t / step));
  const double h = t / steps;
  auto f = [&](const Vector& y) -> Vector { return A * y + c; };
  for (int i = 0; i < steps; ++i) {
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * h * k1);
    const Vector k3 = f(x + 0.5 * h * k2);
    const Vector k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

// Fixed-time cost of the double integrator with state [p(k) v(k)] and R = I,
// from the per-axis closed-form inverse Gramian
//   [[12/t^3, -6/t^2], [-6/t^2, 4/t]].
inline double double_integrator_cost(const Vector& x0, const Vector& x1, double tau)
{
  const auto k = x0.size() / 2;
  double cost = tau;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double rp = x1[i] - (x0[i] + x0[i + k] * tau);
    const double rv = x1[i + k] - x0[i + k];
    cost += 12.0 / (tau * tau * tau) * rp * rp - 12.0 / (tau * tau) * rp * rv + 4.0 / tau * rv * rv;
  }
  return cost;
}

// Minimum of f over [lo, hi]: 10^4 log-spaced samples, then golden-section
// refinement between the neighbors of the best sample.
template <class F>
std::pair<double, double> grid_minimum(F&& f, double lo, double hi, int samples = 10000)
{
  std::vector<double> ts(samples);
  for (int i = 0; i < samples; ++i)
    ts[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (samples - 1));
  int best = 0;
  double best_v = kInf;
  for (int i = 0; i < samples; ++i) {
    const double v = f(ts[i]);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double a = ts[std::max(best - 1, 0)];
  double b = ts[std::min(best + 1, samples - 1)];
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  const double t = fc < fd ? c : d;
  const double v = std::min(fc, fd);
  if (v < best_v)
    return {t, v};
  return {ts[best], best_v};
}

// Single-source shortest path costs; `reverse` follows edges backwards
// (giving costs to `source`).
inline std::vector<double> dijkstra(const btit::search::ExplicitGraph& g, std::uint32_t source, bool reverse = false)
{
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(g.vertices);
  for (const auto& e : g.edges) {
    if (reverse)
      adj[e.to].push_back({e.from, e.weight});
    else
      adj[e.from].push_back({e.to, e.weight});
  }
  std::vector<double> dist(g.vertices, kInf);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u])
      continue;
    for (auto [v, w] : adj[u]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        pq.push({dist[v], v});
      }
    }
  }
  return dist;
}

// The subgraph induced by the vertices flagged in `keep`.
inline btit::search::ExplicitGraph induced(const btit::search::ExplicitGraph& g, const std::vector<char>& keep)
{
  btit::search::ExplicitGraph out = g;
  out.edges.clear();
  for (const auto& e : g.edges)
    if (keep[e.from] && keep[e.to])
      out.edges.push_back(e);
  return out;
}

// Random directed graph over points in the unit square. Edges go to nearby
// points with weight = distance * (1 + U[0, 1)), so Euclidean distance to the
// goal (from the start) is a consistent forward (backward) heuristic. Every
// fourth graph uses zero heuristics.
inline btit::search::ExplicitGraph random_graph(std::uint64_t seed, std::size_t max_vertices = 100,
                                                std::size_t max_degree = 6)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  btit::search::ExplicitGraph g;
  g.vertices = 10 + rng() % (max_vertices - 9);
  std::vector<std::array<double, 2>> p(g.vertices);
  for (auto& q : p)
    q = {u01(rng), u01(rng)};
  auto dist = [&](std::size_t a, std::size_t b) { return std::hypot(p[a][0] - p[b][0], p[a][1] - p[b][1]); };
  for (std::size_t v = 0; v < g.vertices; ++v) {
    std::vector<std::pair<double, std::uint32_t>> by_dist;
    for (std::size_t w = 0; w < g.vertices; ++w)
      if (w != v)
        by_dist.push_back({dist(v, w), static_cast<std::uint32_t>(w)});
    std::sort(by_dist.begin(), by_dist.end());
    const std::size_t degree = 1 + rng() % max_degree;
    for (std::size_t k = 0; k < degree && k < by_dist.size(); ++k) {
      // Skip some nearest neighbors so the graph is not symmetric.
      const std::size_t pick = std::min<std::size_t>(k + rng() % 3, by_dist.size() - 1);
      const auto w = by_dist[pick].second;
      const double jitter = (rng() % 5 == 0) ? 0.0 : u01(rng);
      g.edges.push_back({static_cast<std::uint32_t>(v), w, by_dist[pick].first * (1.0 + jitter)});
    }
  }
  g.start = 0;
  g.goal = static_cast<std::uint32_t>(g.vertices - 1);
  if (seed % 4 != 3) {
    g.h_to_goal.resize(g.vertices);
    g.h_from_start.resize(g.vertices);
    for (std::size_t v = 0; v < g.vertices; ++v) {
      g.h_to_goal[v] = dist(v, g.goal);
      g.h_from_start[v] = dist(v, g.start);
    }
  }
  return g;
}

// Cost of a vertex path over the cheapest parallel edge per hop; inf when a
// hop has no edge.
inline double path_cost(const btit::search::ExplicitGraph& g, const std::vector<std::uint32_t>& path)
{
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    double best = kInf;
    for (const auto& e : g.edges)
      if (e.from == path[i] && e.to == path[i + 1])
        best = std::min(best, e.weight);
    total += best;
  }
  return total;
}

// Median by full sort.
inline double sorted_median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
