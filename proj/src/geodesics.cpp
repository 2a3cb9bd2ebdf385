#include "geok/geodesics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "geok/error.hpp"

namespace geok {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGaussX = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                           -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                           0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussW = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

void require_loop_surface(const SpaceSpec& s) {
  if (s.kind != SpaceKind::flat_torus && s.kind != SpaceKind::revolution_torus)
    throw Error(Errc::unsupported, "loops live on flat tori or tori of revolution");
}

std::size_t chart_dim(const SpaceSpec& s) { return s.kind == SpaceKind::flat_torus ? s.d : 2; }

ChartPoint add(const ChartPoint& p, const ChartPoint& q) {
  ChartPoint r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = p[i] + q[i];
  return r;
}

ChartPoint sub(const ChartPoint& p, const ChartPoint& q) {
  ChartPoint r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = p[i] - q[i];
  return r;
}

double chart_norm(const ChartPoint& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Length of the first `tau` fraction of the chart-linear segment p -> q on a
// torus of revolution.
double revolution_partial_length(double a, double b, const ChartPoint& p, const ChartPoint& q, double tau) {
  const double dth = q[0] - p[0];
  const double dph = q[1] - p[1];
  double s = 0.0;
  for (std::size_t i = 0; i < kGaussX.size(); ++i) {
    const double t = 0.5 * tau * (kGaussX[i] + 1.0);
    const double r = a + b * std::cos(p[0] + t * dth);
    s += kGaussW[i] * std::sqrt(b * b * dth * dth + r * r * dph * dph);
  }
  return 0.5 * tau * s;
}

double partial_length(const SpaceSpec& s, const ChartPoint& p, const ChartPoint& q, double tau) {
  if (s.kind == SpaceKind::revolution_torus) return revolution_partial_length(s.a, s.b, p, q, tau);
  return tau * segment_length(s, p, q);
}

ChartPoint segment_end(const Loop& loop, std::size_t i, const ChartPoint& shift) {
  return i + 1 < loop.size() ? loop.lifted[i + 1] : add(loop.lifted[0], shift);
}

// --- geodesic ODE on the torus of revolution -------------------------------

using State = std::array<double, 4>;  // theta, phi, theta', phi'

State geodesic_rhs(double a, double b, const State& s) {
  const double st = std::sin(s[0]);
  const double r = a + b * std::cos(s[0]);
  return {s[2], s[3], -(r * st / b) * s[3] * s[3], (2.0 * b * st / r) * s[2] * s[3]};
}

struct Shot {
  ChartPoint end;
  ChartPoint mid;
};

Shot shoot(double a, double b, const ChartPoint& p, const std::array<double, 2>& v, int steps) {
  State s = {p[0], p[1], v[0], v[1]};
  const double h = 1.0 / steps;
  Shot out;
  for (int k = 0; k < steps; ++k) {
    const State k1 = geodesic_rhs(a, b, s);
    State tmp;
    for (int c = 0; c < 4; ++c) tmp[c] = s[c] + 0.5 * h * k1[c];
    const State k2 = geodesic_rhs(a, b, tmp);
    for (int c = 0; c < 4; ++c) tmp[c] = s[c] + 0.5 * h * k2[c];
    const State k3 = geodesic_rhs(a, b, tmp);
    for (int c = 0; c < 4; ++c) tmp[c] = s[c] + h * k3[c];
    const State k4 = geodesic_rhs(a, b, tmp);
    for (int c = 0; c < 4; ++c) s[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    if (2 * (k + 1) == steps) out.mid = {s[0], s[1]};
  }
  out.end = {s[0], s[1]};
  return out;
}

ChartPoint revolution_midpoint(double a, double b, const ChartPoint& p, const ChartPoint& q) {
  std::array<double, 2> v = {q[0] - p[0], q[1] - p[1]};
  const double span = std::hypot(v[0], v[1]);
  if (span == 0.0) return p;
  int steps = std::max(8, static_cast<int>(std::ceil(span / 0.05)));
  steps += steps % 2;

  auto residual = [&](const Shot& s) { return std::hypot(s.end[0] - q[0], s.end[1] - q[1]); };
  Shot cur = shoot(a, b, p, v, steps);
  double res = residual(cur);
  for (int it = 0; it < 40; ++it) {
    if (res < 1e-13 * std::max(1.0, span)) return cur.mid;
    const double eps = 1e-7 * std::max(1.0, span);
    double jac[2][2];
    for (int c = 0; c < 2; ++c) {
      auto dv = v;
      dv[c] += eps;
      const Shot s = shoot(a, b, p, dv, steps);
      jac[0][c] = (s.end[0] - cur.end[0]) / eps;
      jac[1][c] = (s.end[1] - cur.end[1]) / eps;
    }
    const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if (!(std::abs(det) > 1e-14)) break;
    const double r0 = cur.end[0] - q[0];
    const double r1 = cur.end[1] - q[1];
    const double step0 = (jac[1][1] * r0 - jac[0][1] * r1) / det;
    const double step1 = (-jac[1][0] * r0 + jac[0][0] * r1) / det;
    // Backtrack until the residual drops.
    double damp = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 20; ++ls, damp *= 0.5) {
      const std::array<double, 2> trial = {v[0] - damp * step0, v[1] - damp * step1};
      const Shot s = shoot(a, b, p, trial, steps);
      const double r = residual(s);
      if (r < res) {
        v = trial;
        cur = s;
        res = r;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (res < 1e-10 * std::max(1.0, span)) return cur.mid;
  std::ostringstream os;
  os << "geodesic shooting from (" << p[0] << "," << p[1] << ") to (" << q[0] << "," << q[1]
     << ") stalled at residual " << res;
  throw Error(Errc::ode_failure, os.str());
}

}  // namespace

bool HomotopyClass::trivial() const noexcept {
  return std::all_of(winding.begin(), winding.end(), [](long w) { return w == 0; });
}

double chart_period(const SpaceSpec& surface) {
  require_loop_surface(surface);
  return surface.kind == SpaceKind::flat_torus ? 1.0 : kTwoPi;
}

std::vector<Point> Loop::vertices() const {
  std::vector<Point> out;
  out.reserve(lifted.size());
  for (const auto& v : lifted) out.push_back(torus_point(surface.kind, v));
  return out;
}

ChartPoint closing_shift(const Loop& loop) {
  const double period = chart_period(loop.surface);
  const auto& first = loop.lifted.front();
  const auto& last = loop.lifted.back();
  ChartPoint shift(first.size());
  for (std::size_t c = 0; c < first.size(); ++c) {
    const double gap = first[c] - last[c];
    const double step = gap - period * std::round(gap / period);
    const double total = last[c] + step - first[c];
    shift[c] = period * std::round(total / period);
  }
  return shift;
}

HomotopyClass winding(const Loop& loop) {
  require_loop_surface(loop.surface);
  const std::size_t m = loop.size();
  if (m < 3) throw Error(Errc::invalid_argument, "a loop needs at least 3 vertices");
  const std::size_t dim = chart_dim(loop.surface);
  const double period = chart_period(loop.surface);
  std::vector<double> total(dim, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (loop.lifted[i].size() != dim) throw Error(Errc::invalid_argument, "vertex has wrong dimension");
    if (i + 1 == m) break;
    for (std::size_t c = 0; c < dim; ++c) {
      const double step = loop.lifted[i + 1][c] - loop.lifted[i][c];
      if (!(std::abs(step) < 0.5 * period)) {
        std::ostringstream os;
        os << "vertices " << i << " and " << i + 1 << " are " << step << " apart in coordinate " << c;
        throw Error(Errc::ambiguous_lift, os.str());
      }
      total[c] += step;
    }
  }
  HomotopyClass out;
  for (std::size_t c = 0; c < dim; ++c) {
    const double gap = loop.lifted[0][c] - loop.lifted[m - 1][c];
    const double step = gap - period * std::round(gap / period);
    if (!(std::abs(step) < 0.5 * period))
      throw Error(Errc::ambiguous_lift, "closing segment spans half a period");
    const double turns = (total[c] + step) / period;
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) >= 0.01) throw Error(Errc::ambiguous_lift, "non-integral winding");
    out.winding.push_back(static_cast<long>(rounded));
  }
  if (loop.surface.kind == SpaceKind::revolution_torus) std::swap(out.winding[0], out.winding[1]);
  return out;
}

double segment_length(const SpaceSpec& s, const ChartPoint& p, const ChartPoint& q) {
  if (s.kind == SpaceKind::revolution_torus) return revolution_partial_length(s.a, s.b, p, q, 1.0);
  if (s.kind != SpaceKind::flat_torus) require_loop_surface(s);
  const std::size_t d = s.d;
  double sum = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double v = 0.0;
    for (std::size_t r = 0; r < d; ++r) v += (q[r] - p[r]) * s.basis[r * d + c];
    sum += v * v;
  }
  return std::sqrt(sum);
}

double loop_length(const Loop& loop) {
  const ChartPoint shift = closing_shift(loop);
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i)
    total += segment_length(loop.surface, loop.lifted[i], segment_end(loop, i, shift));
  return total;
}

ChartPoint geodesic_midpoint(const SpaceSpec& s, const ChartPoint& p, const ChartPoint& q) {
  if (s.kind == SpaceKind::revolution_torus) return revolution_midpoint(s.a, s.b, p, q);
  require_loop_surface(s);
  ChartPoint mid(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mid[i] = 0.5 * (p[i] + q[i]);
  return mid;
}

// ---------------------------------------------------------------------------
// Shortening

namespace {

struct LevelOutcome {
  int iterations = 0;
  bool converged = false;
};

LevelOutcome shorten_level(Loop& loop, const ChartPoint& shift, const HomotopyClass& cls, double max_move,
                           const ShorteningOptions& opts) {
  const std::size_t m = loop.size();
  const SpaceSpec& s = loop.surface;
  LevelOutcome out;
  double len = loop_length(loop);
  for (int it = 0; it < opts.max_iter; ++it) {
    for (std::size_t parity : {1u, 0u}) {
      for (std::size_t i = parity; i < m; i += 2) {
        const ChartPoint prev = i > 0 ? loop.lifted[i - 1] : sub(loop.lifted[m - 1], shift);
        const ChartPoint next = i + 1 < m ? loop.lifted[i + 1] : add(loop.lifted[0], shift);
        const ChartPoint mid = geodesic_midpoint(s, prev, next);
        ChartPoint delta = sub(mid, loop.lifted[i]);
        const double dn = chart_norm(delta);
        if (dn == 0.0) continue;
        if (dn > max_move)
          for (double& x : delta) x *= max_move / dn;
        const ChartPoint cand = add(loop.lifted[i], delta);
        const double before = segment_length(s, prev, loop.lifted[i]) + segment_length(s, loop.lifted[i], next);
        const double after = segment_length(s, prev, cand) + segment_length(s, cand, next);
        if (after < before) loop.lifted[i] = cand;
      }
    }
    if (winding(loop) != cls)
      throw Error(Errc::class_changed, "homotopy class changed at iteration " + std::to_string(it) +
                                           "; lower max_move");
    const double next_len = loop_length(loop);
    const double decrease = len - next_len;
    len = next_len;
    if (decrease < opts.step_tol) {
      out.converged = true;
      break;
    }
    ++out.iterations;
  }
  return out;
}

bool is_power_of_two(std::size_t x) { return x && !(x & (x - 1)); }

}  // namespace

Loop refine_loop(const Loop& loop) {
  const ChartPoint shift = closing_shift(loop);
  Loop out{loop.surface, {}};
  out.lifted.reserve(2 * loop.size());
  for (std::size_t i = 0; i < loop.size(); ++i) {
    out.lifted.push_back(loop.lifted[i]);
    out.lifted.push_back(geodesic_midpoint(loop.surface, loop.lifted[i], segment_end(loop, i, shift)));
  }
  return out;
}

ShorteningResult shorten_loop(const Loop& input, const ShorteningOptions& opts) {
  const HomotopyClass cls = winding(input);
  const double period = chart_period(input.surface);
  const double max_move = opts.max_move > 0.0 ? opts.max_move : period / 8.0;
  if (!(max_move < period / 4.0)) throw Error(Errc::invalid_argument, "max_move must be below period / 4");
  if (opts.max_iter < 1 || !(opts.step_tol >= 0.0))
    throw Error(Errc::invalid_argument, "max_iter must be >= 1 and step_tol >= 0");

  Loop loop = input;
  const bool revolution = loop.surface.kind == SpaceKind::revolution_torus;
  if (opts.perturb && revolution)
    for (auto& v : loop.lifted) v[0] += 0.05;
  if (winding(loop) != cls) throw Error(Errc::class_changed, "perturbation changed the class");
  const ChartPoint shift = closing_shift(loop);

  ShorteningResult result;
  result.report.class_before = cls;
  result.report.contractible = cls.trivial();
  result.report.initial_length = loop_length(loop);

  const std::size_t m = loop.size();
  const std::size_t coarse = std::max<std::size_t>(opts.coarse_vertices, 4);
  bool multilevel = revolution && opts.coarse_to_fine && m > coarse && m % coarse == 0 &&
                    is_power_of_two(m / coarse);
  Loop work = loop;
  if (multilevel) {
    Loop small{loop.surface, {}};
    for (std::size_t i = 0; i < m; i += m / coarse) small.lifted.push_back(loop.lifted[i]);
    try {
      multilevel = winding(small) == cls && closing_shift(small) == shift;
    } catch (const Error&) {
      multilevel = false;
    }
    if (multilevel) work = std::move(small);
  }

  LevelOutcome outcome = shorten_level(work, shift, cls, max_move, opts);
  result.report.iterations = outcome.iterations;
  while (work.size() < m) {
    work = refine_loop(work);
    outcome = shorten_level(work, shift, cls, max_move, opts);
    result.report.iterations += outcome.iterations;
  }

  result.report.converged = outcome.converged;
  result.report.final_length = loop_length(work);
  result.report.class_after = winding(work);
  if (result.report.class_after != cls) throw Error(Errc::class_changed, "class changed during refinement");
  result.loop = std::move(work);
  return result;
}

// ---------------------------------------------------------------------------
// Flat-torus systoles

Loop systole_loop(const SpaceSpec& s, const HomotopyClass& cls, std::size_t m) {
  if (s.kind != SpaceKind::flat_torus) throw Error(Errc::unsupported, "systole_loop needs a flat torus");
  if (cls.winding.size() != s.d) throw Error(Errc::invalid_argument, "class dimension != torus dimension");
  if (cls.trivial()) throw Error(Errc::invalid_argument, "systole of the trivial class is undefined");
  long widest = 0;
  for (long w : cls.winding) widest = std::max(widest, std::abs(w));
  m = std::max<std::size_t>({m, 3, static_cast<std::size_t>(2 * widest + 1)});
  Loop loop{s, {}};
  loop.lifted.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    ChartPoint v(s.d);
    for (std::size_t c = 0; c < s.d; ++c)
      v[c] = static_cast<double>(cls.winding[c]) * static_cast<double>(i) / static_cast<double>(m);
    loop.lifted.push_back(std::move(v));
  }
  return loop;
}

SystoleResult flat_torus_systole(const SpaceSpec& s, long radius) {
  if (s.kind != SpaceKind::flat_torus) throw Error(Errc::unsupported, "systole needs a flat torus");
  const std::size_t d = s.d;
  std::vector<long> w(d, -radius);
  SystoleResult best{INFINITY, {}};
  const ChartPoint origin(d, 0.0);
  while (true) {
    // Count each +-pair once: first nonzero entry positive.
    auto first = std::find_if(w.begin(), w.end(), [](long x) { return x != 0; });
    if (first != w.end() && *first > 0) {
      ChartPoint v(w.begin(), w.end());
      const double len = segment_length(s, origin, v);
      if (len < best.length) best = {len, HomotopyClass{w}};
    }
    std::size_t i = 0;
    while (i < d && w[i] == radius) w[i++] = -radius;
    if (i == d) break;
    ++w[i];
  }
  return best;
}

// ---------------------------------------------------------------------------
// Arclength

namespace {

std::vector<double> cumulative_lengths(const Loop& loop, const ChartPoint& shift) {
  std::vector<double> cum(loop.size() + 1, 0.0);
  for (std::size_t i = 0; i < loop.size(); ++i)
    cum[i + 1] = cum[i] + segment_length(loop.surface, loop.lifted[i], segment_end(loop, i, shift));
  return cum;
}

double invert_partial(const SpaceSpec& s, const ChartPoint& p, const ChartPoint& q, double seg_len,
                      double target) {
  if (seg_len <= 0.0) return 0.0;
  if (s.kind != SpaceKind::revolution_torus) return std::clamp(target / seg_len, 0.0, 1.0);
  const double dth = q[0] - p[0];
  const double dph = q[1] - p[1];
  double t = std::clamp(target / seg_len, 0.0, 1.0);
  for (int it = 0; it < 50; ++it) {
    const double f = partial_length(s, p, q, t) - target;
    const double r = s.a + s.b * std::cos(p[0] + t * dth);
    const double speed = std::sqrt(s.b * s.b * dth * dth + r * r * dph * dph);
    if (speed <= 0.0) break;
    const double step = f / speed;
    t = std::clamp(t - step, 0.0, 1.0);
    if (std::abs(step) < 1e-15) break;
  }
  return t;
}

}  // namespace

std::vector<ChartPoint> equidistribute(const Loop& loop, std::size_t n) {
  if (n < 2) throw Error(Errc::invalid_argument, "equidistribute needs N >= 2");
  (void)winding(loop);
  const ChartPoint shift = closing_shift(loop);
  const auto cum = cumulative_lengths(loop, shift);
  const double total = cum.back();
  std::vector<ChartPoint> out;
  out.reserve(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n);
    while (seg + 1 < loop.size() && cum[seg + 1] <= target) ++seg;
    const ChartPoint& p = loop.lifted[seg];
    const ChartPoint q = segment_end(loop, seg, shift);
    const double t = invert_partial(loop.surface, p, q, cum[seg + 1] - cum[seg], target - cum[seg]);
    ChartPoint x(p.size());
    for (std::size_t c = 0; c < p.size(); ++c) x[c] = p[c] + t * (q[c] - p[c]);
    out.push_back(std::move(x));
  }
  return out;
}

double arclength_position(const Loop& loop, const ChartPoint& x, double tol) {
  const double period = chart_period(loop.surface);
  const ChartPoint shift = closing_shift(loop);
  const auto cum = cumulative_lengths(loop, shift);
  double best = INFINITY, best_pos = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const ChartPoint& p = loop.lifted[i];
    const ChartPoint q = segment_end(loop, i, shift);
    ChartPoint diff = sub(x, p);
    for (double& v : diff) v -= period * std::round(v / period);
    const ChartPoint dir = sub(q, p);
    double dd = 0.0, dx = 0.0;
    for (std::size_t c = 0; c < dir.size(); ++c) {
      dd += dir[c] * dir[c];
      dx += dir[c] * diff[c];
    }
    const double t = dd > 0.0 ? std::clamp(dx / dd, 0.0, 1.0) : 0.0;
    double off = 0.0;
    for (std::size_t c = 0; c < dir.size(); ++c) off += (diff[c] - t * dir[c]) * (diff[c] - t * dir[c]);
    off = std::sqrt(off);
    if (off < best) {
      best = off;
      best_pos = cum[i] + partial_length(loop.surface, p, q, t);
    }
  }
  if (!(best <= tol)) {
    std::ostringstream os;
    os << "point is " << best << " chart units from the loop";
    throw Error(Errc::point_off_loop, os.str());
  }
  return std::fmod(best_pos, cum.back());
}

// ---------------------------------------------------------------------------
// Restricted versus ambient distances

SpadeReport spade_from_distances(const DistanceMatrix& restricted, const DistanceMatrix& ambient,
                                 double tol_numeric) {
  if (restricted.size() != ambient.size()) throw Error(Errc::invalid_argument, "size mismatch");
  SpadeReport rep;
  rep.tol_numeric = tol_numeric;
  const std::size_t n = restricted.size();
  bool first = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dev = restricted(i, j) - ambient(i, j);
      if (first) {
        rep.epsilon_observed = rep.min_deviation = dev;
        first = false;
      }
      rep.epsilon_observed = std::max(rep.epsilon_observed, dev);
      rep.min_deviation = std::min(rep.min_deviation, dev);
      rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(dev));
      ++rep.pairs_checked;
    }
  rep.one_sided = rep.min_deviation >= -tol_numeric;
  return rep;
}

SpadeReport spade_check(const Loop& loop, const std::vector<ChartPoint>& pts, const DistanceOracle& ambient,
                        double tol_numeric) {
  const double total = loop_length(loop);
  std::vector<double> pos;
  pos.reserve(pts.size());
  for (const auto& x : pts) pos.push_back(arclength_position(loop, x));
  const std::size_t n = pts.size();
  DistanceMatrix restricted(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = std::abs(pos[i] - pos[j]);
      restricted.set(i, j, std::min(gap, total - gap));
    }
  std::vector<Point> points;
  points.reserve(n);
  for (const auto& x : pts) points.push_back(torus_point(loop.surface.kind, x));
  return spade_from_distances(restricted, ambient(points), tol_numeric);
}

double clairaut_relative_deviation(const Loop& loop) {
  const SpaceSpec& s = loop.surface;
  if (s.kind != SpaceKind::revolution_torus)
    throw Error(Errc::unsupported, "Clairaut invariant is defined on tori of revolution");
  const ChartPoint shift = closing_shift(loop);
  std::vector<double> vals;
  vals.reserve(loop.size());
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const ChartPoint& p = loop.lifted[i];
    const ChartPoint q = segment_end(loop, i, shift);
    const double len = segment_length(s, p, q);
    if (len <= 0.0) continue;
    const double r = s.a + s.b * std::cos(0.5 * (p[0] + q[0]));
    vals.push_back(r * r * (q[1] - p[1]) / len);
  }
  if (vals.empty()) return 0.0;
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= static_cast<double>(vals.size());
  return mean != 0.0 ? std::sqrt(var) / std::abs(mean) : INFINITY;
}

// ---------------------------------------------------------------------------
// Loop files

Loop read_loop(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<SpaceSpec> surface;
  Loop loop;
  auto fail = [&](const std::string& what) {
    throw Error(Errc::parse_error, "loop line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream is(line);
    if (!surface) {
      std::string kw, kind;
      if (!(is >> kw >> kind) || kw != "surface") fail("expected 'surface <kind> <params>'");
      std::vector<double> params;
      double v;
      while (is >> v) params.push_back(v);
      if (!is.eof()) fail("bad surface parameter");
      std::ostringstream spec;
      spec << std::setprecision(17) << kind << ':';
      for (std::size_t i = 0; i < params.size(); ++i) spec << (i ? "," : "") << params[i];
      if (kind != "flat-torus" && kind != "rev-torus") fail("unsupported loop surface '" + kind + "'");
      try {
        surface = parse_space(spec.str());
      } catch (const Error& e) {
        fail(e.what());
      }
      loop.surface = *surface;
      continue;
    }
    ChartPoint v;
    double x;
    while (is >> x) v.push_back(x);
    if (!is.eof()) fail("not a number");
    if (v.size() != chart_dim(*surface)) fail("vertex must have " + std::to_string(chart_dim(*surface)) + " coordinates");
    for (double c : v)
      if (!std::isfinite(c)) fail("non-finite coordinate");
    loop.lifted.push_back(std::move(v));
  }
  if (!surface) throw Error(Errc::parse_error, "missing surface line");
  if (loop.size() < 3) throw Error(Errc::parse_error, "a loop needs at least 3 vertices");
  return loop;
}

void write_loop(std::ostream& out, const Loop& loop) {
  const SpaceSpec& s = loop.surface;
  out << std::setprecision(17) << "surface " << to_string(s.kind);
  if (s.kind == SpaceKind::flat_torus)
    for (double v : s.basis) out << ' ' << v;
  else
    out << ' ' << s.a << ' ' << s.b;
  out << '\n';
  for (const auto& v : loop.lifted) {
    for (std::size_t c = 0; c < v.size(); ++c) out << (c ? " " : "") << v[c];
    out << '\n';
  }
}

}  // namespace geok
