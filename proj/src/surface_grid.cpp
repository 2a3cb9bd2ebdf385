#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <queue>
#include <unordered_map>
#include <utility>

#include "geok/error.hpp"
#include "geok/geodesics.hpp"

namespace geok {

namespace {

struct Offset {
  int dth, dph;
};

constexpr std::array<Offset, 16> kStencil = {{{1, 0},  {-1, 0}, {0, 1},  {0, -1}, {1, 1},  {1, -1},
                                               {-1, 1}, {-1, -1}, {1, 2},  {1, -2}, {-1, 2}, {-1, -2},
                                               {2, 1},  {2, -1}, {-2, 1}, {-2, -1}}};

std::size_t wrap(long i, std::size_t m) {
  const long mm = static_cast<long>(m);
  return static_cast<std::size_t>(((i % mm) + mm) % mm);
}

SpaceSpec surface_of(double a, double b) { return SpaceSpec::revolution_torus(a, b); }

// Query points attached to the grid for one pairwise evaluation.
struct Attachment {
  std::vector<std::size_t> node_of;  // graph node of each query point
  std::unordered_map<std::size_t, std::vector<std::pair<std::size_t, double>>> extra;
};

}  // namespace

SurfaceGrid::SurfaceGrid(double a, double b, double h, std::size_t max_nodes) : a_(a), b_(b) {
  (void)surface_of(a, b);
  if (!(h > 0.0) || h > kPi / 16 * (1.0 + 1e-12))
    throw Error(Errc::invalid_argument, "grid pitch must lie in (0, pi/16]");
  m_ = static_cast<std::size_t>(std::ceil(kTwoPi / h - 1e-9));
  if (m_ > max_nodes / m_)
    throw Error(Errc::out_of_memory, "grid of " + std::to_string(m_) + "^2 nodes exceeds the node cap");
  pitch_ = kTwoPi / static_cast<double>(m_);
  const SpaceSpec s = surface_of(a, b);
  edge_len_.resize(m_ * kStencil.size());
  for (std::size_t i = 0; i < m_; ++i) {
    const double th = static_cast<double>(i) * pitch_;
    for (std::size_t k = 0; k < kStencil.size(); ++k) {
      const ChartPoint p = {th, 0.0};
      const ChartPoint q = {th + kStencil[k].dth * pitch_, kStencil[k].dph * pitch_};
      edge_len_[i * kStencil.size() + k] = segment_length(s, p, q);
    }
  }
}

double SurfaceGrid::distance(const ChartPoint& p, const ChartPoint& q) const {
  return pairwise({p, q})(0, 1);
}

DistanceMatrix SurfaceGrid::pairwise(const std::vector<ChartPoint>& pts) const {
  const std::size_t n = pts.size();
  const std::size_t grid_nodes = m_ * m_;
  const SpaceSpec s = surface_of(a_, b_);

  // Reduce into [0, 2pi)^2 and attach each point to the graph.
  std::vector<ChartPoint> red(n);
  Attachment att;
  att.node_of.resize(n);
  std::size_t next_virtual = grid_nodes;
  auto link = [&](std::size_t u, std::size_t v, double w) {
    att.extra[u].push_back({v, w});
    att.extra[v].push_back({u, w});
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (pts[i].size() != 2) throw Error(Errc::invalid_point, "torus point needs (theta, phi)");
    red[i] = torus_point(SpaceKind::revolution_torus, pts[i]).coords;
    const double ft = red[i][0] / pitch_, fp = red[i][1] / pitch_;
    const long it = std::lround(ft), ip = std::lround(fp);
    if (std::abs(ft - it) < 1e-9 && std::abs(fp - ip) < 1e-9) {
      att.node_of[i] = wrap(it, m_) * m_ + wrap(ip, m_);
      continue;
    }
    const std::size_t v = next_virtual++;
    att.node_of[i] = v;
    const long bt = static_cast<long>(std::floor(ft)), bp = static_cast<long>(std::floor(fp));
    for (long dt = -1; dt <= 2; ++dt)
      for (long dp = -1; dp <= 2; ++dp) {
        const ChartPoint node = {static_cast<double>(bt + dt) * pitch_, static_cast<double>(bp + dp) * pitch_};
        link(v, wrap(bt + dt, m_) * m_ + wrap(bp + dp, m_), segment_length(s, red[i], node));
      }
  }
  // Nearby query points also see each other directly.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (att.node_of[i] == att.node_of[j]) continue;
      ChartPoint q = red[j];
      bool near = true;
      for (int c = 0; c < 2; ++c) {
        q[c] -= kTwoPi * std::round((q[c] - red[i][c]) / kTwoPi);
        near = near && std::abs(q[c] - red[i][c]) <= 2.0 * pitch_;
      }
      if (near) link(att.node_of[i], att.node_of[j], segment_length(s, red[i], q));
    }

  const std::size_t total = next_virtual;
  DistanceMatrix out(n);
  std::vector<double> dist(total);
  std::vector<char> done(total);
  using Item = std::pair<double, std::size_t>;
  for (std::size_t src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), INFINITY);
    std::fill(done.begin(), done.end(), 0);
    std::size_t remaining = n - src - 1;
    if (remaining == 0) break;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[att.node_of[src]] = 0.0;
    heap.push({0.0, att.node_of[src]});
    std::unordered_map<std::size_t, std::vector<std::size_t>> targets;
    for (std::size_t j = src + 1; j < n; ++j) targets[att.node_of[j]].push_back(j);
    while (!heap.empty() && remaining > 0) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (done[u]) continue;
      done[u] = 1;
      if (auto t = targets.find(u); t != targets.end()) remaining -= t->second.size();
      auto relax = [&](std::size_t v, double w) {
        const double nd = du + w;
        if (nd < dist[v]) {
          dist[v] = nd;
          heap.push({nd, v});
        }
      };
      if (u < grid_nodes) {
        const std::size_t row = u / m_, col = u % m_;
        for (std::size_t k = 0; k < kStencil.size(); ++k) {
          const std::size_t v = wrap(static_cast<long>(row) + kStencil[k].dth, m_) * m_ +
                                wrap(static_cast<long>(col) + kStencil[k].dph, m_);
          relax(v, edge_len_[row * kStencil.size() + k]);
        }
      }
      if (auto e = att.extra.find(u); e != att.extra.end())
        for (const auto& [v, w] : e->second) relax(v, w);
    }
    for (std::size_t j = src + 1; j < n; ++j) out.set(src, j, dist[att.node_of[j]]);
  }
  return out;
}

double surface_distance_approx(const SpaceSpec& surface, const ChartPoint& p, const ChartPoint& q, double h) {
  if (surface.kind != SpaceKind::revolution_torus)
    throw Error(Errc::unsupported, "grid distance is defined on tori of revolution");
  return SurfaceGrid(surface.a, surface.b, h).distance(p, q);
}

}  // namespace geok
