#include "geok/spaces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "geok/error.hpp"
#include "geok/geodesics.hpp"
#include "geok/rng.hpp"

namespace geok {

namespace {

constexpr double kPointTol = 1e-10;

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::invalid_argument, what); }
[[noreturn]] void bad_point(const std::string& what) { throw Error(Errc::invalid_point, what); }

double reduce_period(double x, double period) {
  double r = x - period * std::floor(x / period);
  if (r >= period) r -= period;
  if (r < 0.0) r = 0.0;
  return r;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

// Angle between unit vectors, written to stay accurate near 0 and pi.
double sphere_angle(std::span<const double> p, std::span<const double> q) {
  double dm = 0.0, dp = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dm += (p[i] - q[i]) * (p[i] - q[i]);
    dp += (p[i] + q[i]) * (p[i] + q[i]);
  }
  return 2.0 * std::atan2(std::sqrt(dm), std::sqrt(dp));
}

double projective_angle(std::span<const double> p, std::span<const double> q) {
  double dm = 0.0, dp = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dm += (p[i] - q[i]) * (p[i] - q[i]);
    dp += (p[i] + q[i]) * (p[i] + q[i]);
  }
  const double lo = std::sqrt(std::min(dm, dp));
  const double hi = std::sqrt(std::max(dm, dp));
  return 2.0 * std::atan2(lo, hi);
}

double minkowski(std::span<const double> u, std::span<const double> v) {
  double s = -u[0] * v[0];
  for (std::size_t i = 1; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double flat_torus_distance(const SpaceSpec& s, std::span<const double> p, std::span<const double> q) {
  const std::size_t d = s.d;
  std::vector<double> base(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = p[i] - q[i];
    base[i] = diff - std::round(diff);
  }
  // Search translates in {-2..2}^d around the reduced difference.
  std::vector<int> shift(d, -2);
  std::vector<double> f(d), x(d);
  double best = INFINITY;
  while (true) {
    for (std::size_t i = 0; i < d; ++i) f[i] = base[i] + shift[i];
    for (std::size_t c = 0; c < d; ++c) {
      double v = 0.0;
      for (std::size_t r = 0; r < d; ++r) v += f[r] * s.basis[r * d + c];
      x[c] = v;
    }
    best = std::min(best, norm(x));
    std::size_t i = 0;
    while (i < d && shift[i] == 2) shift[i++] = -2;
    if (i == d) break;
    ++shift[i];
  }
  return best;
}

// Principal angles via the eigenvectors of (P^T Q)^T (P^T Q): each principal
// vector w = Q v gives cos = |P^T w| and sin = |w - P P^T w|, and atan2 keeps
// small angles accurate.
double grassmann_distance(const SpaceSpec& s, std::span<const double> p, std::span<const double> q) {
  const std::size_t n = s.n, k = s.k;
  std::vector<double> m(k * k, 0.0);  // P^T Q
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double v = 0.0;
      for (std::size_t r = 0; r < n; ++r) v += p[r * k + i] * q[r * k + j];
      m[i * k + j] = v;
    }
  SymmetricMatrix mtm(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      double v = 0.0;
      for (std::size_t r = 0; r < k; ++r) v += m[r * k + i] * m[r * k + j];
      mtm.set(i, j, v);
    }
  const Eigensystem es = jacobi_eigensystem(mtm);
  double sum_sq = 0.0;
  std::vector<double> w(n), ptw(k);
  for (std::size_t col = 0; col < k; ++col) {
    for (std::size_t r = 0; r < n; ++r) {
      double v = 0.0;
      for (std::size_t j = 0; j < k; ++j) v += q[r * k + j] * es.vectors[j * k + col];
      w[r] = v;
    }
    for (std::size_t i = 0; i < k; ++i) {
      double v = 0.0;
      for (std::size_t r = 0; r < n; ++r) v += p[r * k + i] * w[r];
      ptw[i] = v;
    }
    double res = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double proj = 0.0;
      for (std::size_t i = 0; i < k; ++i) proj += p[r * k + i] * ptw[i];
      res += (w[r] - proj) * (w[r] - proj);
    }
    const double theta = std::atan2(std::sqrt(res), norm(ptw));
    sum_sq += theta * theta;
  }
  return std::sqrt(sum_sq);
}

double stein_distance(const SpaceSpec& s, std::span<const double> x, std::span<const double> y) {
  const std::size_t n = s.n;
  std::vector<double> mid(n * n);
  for (std::size_t i = 0; i < n * n; ++i) mid[i] = 0.5 * (x[i] + y[i]);
  const double div = spd_logdet(mid, n) - 0.5 * (spd_logdet(x, n) + spd_logdet(y, n));
  return std::sqrt(std::max(div, 0.0));
}

std::vector<double> parse_numbers(std::string_view text, char sep) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(sep, pos);
    if (next == std::string_view::npos) next = text.size();
    std::string item(text.substr(pos, next - pos));
    std::istringstream is(item);
    double v;
    if (!(is >> v) || !(is >> std::ws).eof())
      throw Error(Errc::parse_error, "not a number: '" + item + "'");
    out.push_back(v);
    pos = next + 1;
  }
  return out;
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e6)
    throw Error(Errc::invalid_argument, std::string(what) + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string_view to_string(SpaceKind kind) noexcept {
  switch (kind) {
    case SpaceKind::circle: return "circle";
    case SpaceKind::sphere: return "sphere";
    case SpaceKind::projective: return "projective";
    case SpaceKind::flat_torus: return "flat-torus";
    case SpaceKind::revolution_torus: return "rev-torus";
    case SpaceKind::hyperboloid: return "hyperboloid";
    case SpaceKind::grassmannian: return "grassmann";
    case SpaceKind::spd_stein: return "spd-stein";
    case SpaceKind::finite: return "finite";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// SpaceSpec

SpaceSpec SpaceSpec::circle(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) invalid("circle radius must be > 0");
  SpaceSpec s;
  s.kind = SpaceKind::circle;
  s.radius = radius;
  return s;
}

SpaceSpec SpaceSpec::sphere(std::size_t n) {
  if (n < 1) invalid("sphere dimension must be >= 1");
  SpaceSpec s;
  s.kind = SpaceKind::sphere;
  s.n = n;
  return s;
}

SpaceSpec SpaceSpec::projective(std::size_t n) {
  if (n < 1) invalid("projective dimension must be >= 1");
  SpaceSpec s;
  s.kind = SpaceKind::projective;
  s.n = n;
  return s;
}

SpaceSpec SpaceSpec::flat_torus(std::size_t d, std::vector<double> basis) {
  if (d < 1) invalid("flat torus dimension must be >= 1");
  if (basis.size() != d * d) invalid("flat torus basis must have d*d entries");
  for (double v : basis)
    if (!std::isfinite(v)) invalid("flat torus basis has non-finite entries");
  if (!is_lll_reduced(d, basis)) invalid("flat torus basis must be nonsingular and LLL-reduced");
  SpaceSpec s;
  s.kind = SpaceKind::flat_torus;
  s.d = d;
  s.basis = std::move(basis);
  return s;
}

SpaceSpec SpaceSpec::revolution_torus(double a, double b) {
  if (!(b > 0.0) || !(a > b) || !std::isfinite(a)) invalid("torus of revolution requires a > b > 0");
  SpaceSpec s;
  s.kind = SpaceKind::revolution_torus;
  s.a = a;
  s.b = b;
  return s;
}

SpaceSpec SpaceSpec::hyperboloid(std::size_t n) {
  if (n < 1) invalid("hyperboloid dimension must be >= 1");
  SpaceSpec s;
  s.kind = SpaceKind::hyperboloid;
  s.n = n;
  return s;
}

SpaceSpec SpaceSpec::grassmannian(std::size_t k, std::size_t n) {
  if (k < 1 || k >= n) invalid("grassmannian requires 1 <= k < n");
  SpaceSpec s;
  s.kind = SpaceKind::grassmannian;
  s.k = k;
  s.n = n;
  return s;
}

SpaceSpec SpaceSpec::spd_stein(std::size_t n) {
  if (n < 1) invalid("spd size must be >= 1");
  SpaceSpec s;
  s.kind = SpaceKind::spd_stein;
  s.n = n;
  return s;
}

SpaceSpec SpaceSpec::finite_space(std::shared_ptr<const FiniteMetricSpace> space) {
  if (!space) invalid("null finite metric space");
  SpaceSpec s;
  s.kind = SpaceKind::finite;
  s.finite = std::move(space);
  return s;
}

std::size_t SpaceSpec::coord_count() const noexcept {
  switch (kind) {
    case SpaceKind::circle: return 1;
    case SpaceKind::sphere:
    case SpaceKind::projective:
    case SpaceKind::hyperboloid: return n + 1;
    case SpaceKind::flat_torus: return d;
    case SpaceKind::revolution_torus: return 2;
    case SpaceKind::grassmannian: return n * k;
    case SpaceKind::spd_stein: return n * n;
    case SpaceKind::finite: return 0;
  }
  return 0;
}

std::string SpaceSpec::describe() const {
  std::string out(to_string(kind));
  out += ':';
  switch (kind) {
    case SpaceKind::circle: out += fmt_num(radius); break;
    case SpaceKind::sphere:
    case SpaceKind::projective:
    case SpaceKind::hyperboloid:
    case SpaceKind::spd_stein: out += std::to_string(n); break;
    case SpaceKind::flat_torus:
      for (std::size_t i = 0; i < basis.size(); ++i) out += (i ? "," : "") + fmt_num(basis[i]);
      break;
    case SpaceKind::revolution_torus: out += fmt_num(a) + "," + fmt_num(b); break;
    case SpaceKind::grassmannian: out += std::to_string(k) + "," + std::to_string(n); break;
    case SpaceKind::finite: out += finite ? finite->source : std::string(); break;
  }
  return out;
}

SpaceSpec parse_space(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon + 1 >= text.size())
    throw Error(Errc::parse_error, "space must look like <kind>:<params>, got '" + std::string(text) + "'");
  const std::string_view kind = text.substr(0, colon);
  const std::string_view params = text.substr(colon + 1);
  if (kind == "finite") {
    auto fm = std::make_shared<FiniteMetricSpace>(load_finite_metric(std::string(params)));
    return SpaceSpec::finite_space(std::move(fm));
  }
  const auto v = parse_numbers(params, ',');
  auto need = [&](std::size_t count) {
    if (v.size() != count)
      throw Error(Errc::parse_error, std::string(kind) + " takes " + std::to_string(count) + " parameter(s)");
  };
  if (kind == "circle") { need(1); return SpaceSpec::circle(v[0]); }
  if (kind == "sphere") { need(1); return SpaceSpec::sphere(as_count(v[0], "sphere dimension")); }
  if (kind == "projective") { need(1); return SpaceSpec::projective(as_count(v[0], "projective dimension")); }
  if (kind == "hyperboloid") { need(1); return SpaceSpec::hyperboloid(as_count(v[0], "hyperboloid dimension")); }
  if (kind == "spd-stein") { need(1); return SpaceSpec::spd_stein(as_count(v[0], "spd size")); }
  if (kind == "rev-torus") { need(2); return SpaceSpec::revolution_torus(v[0], v[1]); }
  if (kind == "grassmann") {
    need(2);
    return SpaceSpec::grassmannian(as_count(v[0], "k"), as_count(v[1], "n"));
  }
  if (kind == "flat-torus") {
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) throw Error(Errc::parse_error, "flat-torus basis must have d*d entries");
    return SpaceSpec::flat_torus(d, v);
  }
  throw Error(Errc::parse_error, "unknown space kind '" + std::string(kind) + "'");
}

bool is_lll_reduced(std::size_t d, const std::vector<double>& basis) {
  // Gram-Schmidt on the rows.
  std::vector<double> star(basis);
  std::vector<double> mu(d * d, 0.0), bnorm(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      mu[i * d + j] = dot({&basis[i * d], d}, {&star[j * d], d}) / bnorm[j];
      for (std::size_t c = 0; c < d; ++c) star[i * d + c] -= mu[i * d + j] * star[j * d + c];
    }
    bnorm[i] = dot({&star[i * d], d}, {&star[i * d], d});
    const double scale = dot({&basis[i * d], d}, {&basis[i * d], d});
    if (!(bnorm[i] > 1e-24 * std::max(scale, 1e-300))) return false;
  }
  constexpr double slack = 1e-12;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(mu[i * d + j]) > 0.5 + slack) return false;
  for (std::size_t i = 1; i < d; ++i) {
    const double m = mu[i * d + i - 1];
    if (bnorm[i] < (0.75 - m * m) * bnorm[i - 1] * (1.0 - slack)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Points

Point circle_point(double angle) { return Point{SpaceKind::circle, {reduce_period(angle, kTwoPi)}, 0}; }

Point unit_vector_point(SpaceKind kind, std::vector<double> v) {
  if (kind != SpaceKind::sphere && kind != SpaceKind::projective)
    invalid("unit_vector_point is for sphere or projective points");
  const double nv = norm(v);
  if (!(nv > 0.0)) bad_point("zero vector");
  for (double& x : v) x /= nv;
  return Point{kind, std::move(v), 0};
}

Point torus_point(SpaceKind kind, std::vector<double> chart) {
  double period;
  if (kind == SpaceKind::flat_torus) period = 1.0;
  else if (kind == SpaceKind::revolution_torus) period = kTwoPi;
  else invalid("torus_point is for flat or revolution tori");
  for (double& x : chart) x = reduce_period(x, period);
  return Point{kind, std::move(chart), 0};
}

Point finite_point(std::size_t index) { return Point{SpaceKind::finite, {}, index}; }

void validate_point(const SpaceSpec& s, const Point& p) {
  if (p.kind != s.kind)
    throw Error(Errc::kind_mismatch, std::string("point of kind ") + std::string(to_string(p.kind)) +
                                         " used with space " + std::string(to_string(s.kind)));
  if (s.kind == SpaceKind::finite) {
    if (p.index >= s.finite->size()) bad_point("finite point index out of range");
    return;
  }
  if (p.coords.size() != s.coord_count()) bad_point("wrong number of coordinates");
  for (double x : p.coords)
    if (!std::isfinite(x)) bad_point("non-finite coordinate");
  switch (s.kind) {
    case SpaceKind::circle:
      if (p.coords[0] < 0.0 || p.coords[0] >= kTwoPi) bad_point("circle angle outside [0, 2pi)");
      break;
    case SpaceKind::revolution_torus:
      for (double x : p.coords)
        if (x < 0.0 || x >= kTwoPi) bad_point("torus chart coordinate outside [0, 2pi)");
      break;
    case SpaceKind::flat_torus:
      for (double x : p.coords)
        if (x < 0.0 || x >= 1.0) bad_point("fractional coordinate outside [0, 1)");
      break;
    case SpaceKind::sphere:
    case SpaceKind::projective:
      if (std::abs(norm(p.coords) - 1.0) > kPointTol) bad_point("vector is not unit length");
      break;
    case SpaceKind::hyperboloid: {
      const double x0 = p.coords[0];
      if (!(x0 > 0.0)) bad_point("hyperboloid point must have x0 > 0");
      if (std::abs(minkowski(p.coords, p.coords) + 1.0) > kPointTol * std::max(1.0, x0 * x0))
        bad_point("Minkowski norm is not -1");
      break;
    }
    case SpaceKind::grassmannian: {
      const std::size_t n = s.n, k = s.k;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
          double v = 0.0;
          for (std::size_t r = 0; r < n; ++r) v += p.coords[r * k + i] * p.coords[r * k + j];
          if (std::abs(v - (i == j ? 1.0 : 0.0)) > kPointTol) bad_point("frame is not orthonormal");
        }
      break;
    }
    case SpaceKind::spd_stein: {
      const std::size_t n = s.n;
      double scale = 1.0;
      for (double x : p.coords) scale = std::max(scale, std::abs(x));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (std::abs(p.coords[i * n + j] - p.coords[j * n + i]) > kPointTol * scale)
            bad_point("matrix is not symmetric");
      try {
        (void)spd_logdet(p.coords, n);
      } catch (const Error&) {
        bad_point("matrix is not positive definite");
      }
      break;
    }
    case SpaceKind::finite: break;
  }
}

// ---------------------------------------------------------------------------
// Distances

DistanceMatrix DistanceMatrix::from_dense(std::size_t n, std::vector<double> v) {
  if (n == 0 || v.size() != n * n) invalid("distance matrix size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i * n + i] != 0.0) invalid("distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      const double x = v[i * n + j];
      if (!std::isfinite(x) || x < 0.0) invalid("distances must be finite and nonnegative");
      if (x != v[j * n + i]) invalid("distance matrix must be symmetric");
    }
  }
  DistanceMatrix d(n);
  d.data_ = std::move(v);
  return d;
}

double distance(const SpaceSpec& s, const Point& p, const Point& q) {
  validate_point(s, p);
  validate_point(s, q);
  switch (s.kind) {
    case SpaceKind::circle: {
      double delta = std::abs(p.coords[0] - q.coords[0]);
      delta = std::min(delta, kTwoPi - delta);
      return s.radius * delta;
    }
    case SpaceKind::sphere: return sphere_angle(p.coords, q.coords);
    case SpaceKind::projective: return projective_angle(p.coords, q.coords);
    case SpaceKind::flat_torus: return flat_torus_distance(s, p.coords, q.coords);
    case SpaceKind::revolution_torus:
      return surface_distance_approx(s, p.coords, q.coords, s.grid_pitch);
    case SpaceKind::hyperboloid: {
      // |p - q|_M^2 = -2 - 2<p,q>_M, and d = 2 asinh(|p - q|_M / 2).
      std::vector<double> diff(p.coords.size());
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = p.coords[i] - q.coords[i];
      const double chord2 = std::max(minkowski(diff, diff), 0.0);
      return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
    }
    case SpaceKind::grassmannian: return grassmann_distance(s, p.coords, q.coords);
    case SpaceKind::spd_stein: return stein_distance(s, p.coords, q.coords);
    case SpaceKind::finite: return s.finite->matrix(p.index, q.index);
  }
  return 0.0;
}

DistanceMatrix pairwise_distances(const SpaceSpec& s, const std::vector<Point>& pts) {
  if (pts.empty()) invalid("no points");
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    try {
      validate_point(s, pts[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "point " + std::to_string(i) + ": " + e.what());
    }
  }
  if (s.kind == SpaceKind::revolution_torus) {
    std::vector<ChartPoint> chart;
    chart.reserve(n);
    for (const auto& p : pts) chart.push_back(p.coords);
    return SurfaceGrid(s.a, s.b, s.grid_pitch).pairwise(chart);
  }
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      try {
        d.set(i, j, distance(s, pts[i], pts[j]));
      } catch (const Error& e) {
        throw Error(e.code(), "points (" + std::to_string(i) + "," + std::to_string(j) + "): " + e.what());
      }
    }
  return d;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

std::vector<double> gaussian_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

// Modified Gram-Schmidt, applied twice, on the columns of a row-major n x k array.
void orthonormalize_columns(std::vector<double>& a, std::size_t n, std::size_t k) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < c; ++j) {
        double proj = 0.0;
        for (std::size_t r = 0; r < n; ++r) proj += a[r * k + j] * a[r * k + c];
        for (std::size_t r = 0; r < n; ++r) a[r * k + c] -= proj * a[r * k + j];
      }
      double nn = 0.0;
      for (std::size_t r = 0; r < n; ++r) nn += a[r * k + c] * a[r * k + c];
      nn = std::sqrt(nn);
      for (std::size_t r = 0; r < n; ++r) a[r * k + c] /= nn;
    }
  }
}

}  // namespace

std::vector<Point> sample_points(const SpaceSpec& s, std::size_t count, std::uint64_t seed) {
  if (count < 1) invalid("sample count must be >= 1");
  Rng rng(seed);
  std::vector<Point> out;
  out.reserve(count);
  if (s.kind == SpaceKind::finite) {
    const std::size_t size = s.finite->size();
    if (count > size)
      throw Error(Errc::unsupported, "cannot draw " + std::to_string(count) + " points from a " +
                                         std::to_string(size) + "-point space");
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(size - i));
      std::swap(idx[i], idx[j]);
      out.push_back(finite_point(idx[i]));
    }
    return out;
  }
  for (std::size_t t = 0; t < count; ++t) {
    switch (s.kind) {
      case SpaceKind::circle: out.push_back(circle_point(rng.uniform(0.0, kTwoPi))); break;
      case SpaceKind::sphere:
      case SpaceKind::projective: {
        std::vector<double> v;
        double nv = 0.0;
        do {
          v = gaussian_vector(rng, s.n + 1);
          nv = norm(v);
        } while (nv < 1e-12);
        out.push_back(unit_vector_point(s.kind, std::move(v)));
        break;
      }
      case SpaceKind::flat_torus: {
        std::vector<double> f(s.d);
        for (double& x : f) x = rng.uniform();
        out.push_back(Point{SpaceKind::flat_torus, std::move(f), 0});
        break;
      }
      case SpaceKind::revolution_torus:
        out.push_back(Point{SpaceKind::revolution_torus,
                            {rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)}, 0});
        break;
      case SpaceKind::hyperboloid: {
        std::vector<double> x(s.n + 1);
        double r2 = 0.0;
        for (std::size_t i = 1; i <= s.n; ++i) {
          x[i] = rng.normal();
          r2 += x[i] * x[i];
        }
        x[0] = std::sqrt(1.0 + r2);
        out.push_back(Point{SpaceKind::hyperboloid, std::move(x), 0});
        break;
      }
      case SpaceKind::grassmannian: {
        auto a = gaussian_vector(rng, s.n * s.k);
        orthonormalize_columns(a, s.n, s.k);
        out.push_back(Point{SpaceKind::grassmannian, std::move(a), 0});
        break;
      }
      case SpaceKind::spd_stein: {
        const std::size_t n = s.n;
        const auto a = gaussian_vector(rng, n * n);
        std::vector<double> x(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            double v = 0.0;
            for (std::size_t r = 0; r < n; ++r) v += a[r * n + i] * a[r * n + j];
            x[i * n + j] = v + (i == j ? 0.1 : 0.0);
          }
        out.push_back(Point{SpaceKind::spd_stein, std::move(x), 0});
        break;
      }
      case SpaceKind::finite: break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metric validation and finite metric files

std::vector<MetricViolation> validate_metric(const DistanceMatrix& d, double tol) {
  if (!(tol >= 0.0)) invalid("metric tolerance must be >= 0");
  std::vector<MetricViolation> out;
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        if (d(i, k) > d(i, j) + d(j, k) + tol) out.push_back({i, k, j});
      }
  return out;
}

DistanceMatrix read_distance_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::optional<std::size_t> n;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    std::istringstream is(line);
    std::vector<double> vals;
    std::string tok;
    while (is >> tok) {
      double v = 0.0;
      const char* b = tok.data();
      const char* e = tok.data() + tok.size();
      if (*b == '+') ++b;
      auto [ptr, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || ptr != e) fail("not a number: '" + tok + "'");
      vals.push_back(v);
    }
    if (!n) {
      if (vals.size() != 1 || !(vals[0] >= 1.0) || vals[0] != std::floor(vals[0]))
        fail("first line must be the point count n >= 1");
      n = static_cast<std::size_t>(vals[0]);
      continue;
    }
    rows.push_back(std::move(vals));
  }
  if (!n) throw Error(Errc::parse_error, "empty file");
  const std::size_t size = *n;

  // Strict lower triangle: rows 1..n-1 with 1..n-1 entries. Inclusive form:
  // rows 0..n-1 with 1..n entries ending in a zero diagonal.
  bool inclusive = false;
  if (rows.size() == size && size > 0 && rows[0].size() == 1) inclusive = true;
  else if (rows.size() != size - 1)
    throw Error(Errc::parse_error, "expected " + std::to_string(size - 1) + " lower-triangle rows, got " +
                                       std::to_string(rows.size()));

  std::vector<double> dense(size * size, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t i = inclusive ? r : r + 1;
    const std::size_t expect = inclusive ? i + 1 : i;
    if (rows[r].size() != expect)
      throw Error(Errc::parse_error, "row " + std::to_string(i) + " must have " + std::to_string(expect) +
                                         " entries");
    for (std::size_t j = 0; j < expect; ++j) {
      const double v = rows[r][j];
      if (!std::isfinite(v) || v < 0.0)
        throw Error(Errc::parse_error, "row " + std::to_string(i) + ": distances must be finite and >= 0");
      if (j == i) {
        if (v != 0.0) throw Error(Errc::parse_error, "row " + std::to_string(i) + ": diagonal must be 0");
        continue;
      }
      dense[i * size + j] = dense[j * size + i] = v;
    }
  }
  return DistanceMatrix::from_dense(size, std::move(dense));
}

FiniteMetricSpace parse_finite_metric(std::istream& in, std::string source) {
  FiniteMetricSpace fm;
  fm.matrix = read_distance_matrix(in);
  fm.source = std::move(source);
  const auto bad = validate_metric(fm.matrix, 1e-12);
  if (!bad.empty()) {
    const auto& v = bad.front();
    std::ostringstream os;
    os << std::setprecision(17) << "triangle inequality fails for (" << v.from << "," << v.to << ") via "
       << v.via << ": " << fm.matrix(v.from, v.to) << " > " << fm.matrix(v.from, v.via) << " + "
       << fm.matrix(v.via, v.to);
    throw Error(Errc::metric_violation, os.str());
  }
  return fm;
}

FiniteMetricSpace load_finite_metric(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open '" + path + "'");
  return parse_finite_metric(in, path);
}

void write_finite_metric(std::ostream& out, const DistanceMatrix& d) {
  out << d.size() << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) out << (j ? " " : "") << d(i, j);
    out << '\n';
  }
}

}  // namespace geok
