#include "geok/witness.hpp"

#include <algorithm>
#include <cmath>

#include "geok/error.hpp"

namespace geok {

std::string_view to_string(WitnessMode mode) noexcept {
  switch (mode) {
    case WitnessMode::direct: return "direct";
    case WitnessMode::certified: return "certified";
    case WitnessMode::automatic: return "auto";
  }
  return "?";
}

WitnessMode parse_witness_mode(std::string_view text) {
  if (text == "direct") return WitnessMode::direct;
  if (text == "certified") return WitnessMode::certified;
  if (text == "auto") return WitnessMode::automatic;
  throw Error(Errc::invalid_argument, "mode must be direct, certified or auto");
}

DistanceMatrix circle_law(std::size_t n, double length) {
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d.set(i, j, length * static_cast<double>(circmin(static_cast<long long>(j - i), n)) / static_cast<double>(n));
  return d;
}

namespace {

double frac_angle(std::size_t i, std::size_t n, double full) {
  return full * static_cast<double>(i) / static_cast<double>(n);
}

Loop wobbly_outer_equator(const SpaceSpec& s, std::size_t m) {
  Loop loop{s, {}};
  loop.lifted.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double phi = frac_angle(i, m, kTwoPi);
    loop.lifted.push_back({0.1 * std::sin(phi), phi});
  }
  return loop;
}

}  // namespace

CanonicalLoop canonical_loop(const SpaceSpec& s, const CanonicalLoopOptions& opts) {
  CanonicalLoop out;
  switch (s.kind) {
    case SpaceKind::circle:
      out.descriptor = {"circle", kTwoPi * s.radius, {1}};
      out.sample = [](std::size_t n) {
        std::vector<Point> pts;
        for (std::size_t i = 0; i < n; ++i) pts.push_back(circle_point(frac_angle(i, n, kTwoPi)));
        return pts;
      };
      return out;
    case SpaceKind::sphere:
    case SpaceKind::projective: {
      const bool rp = s.kind == SpaceKind::projective;
      out.descriptor = {rp ? "projective-line" : "great-circle", rp ? kPi : kTwoPi, {1}};
      const std::size_t dim = s.n + 1;
      const SpaceKind kind = s.kind;
      out.sample = [dim, kind, rp](std::size_t n) {
        std::vector<Point> pts;
        for (std::size_t i = 0; i < n; ++i) {
          const double t = frac_angle(i, n, rp ? kPi : kTwoPi);
          std::vector<double> v(dim, 0.0);
          v[0] = std::cos(t);
          v[1] = std::sin(t);
          pts.push_back(unit_vector_point(kind, std::move(v)));
        }
        return pts;
      };
      return out;
    }
    case SpaceKind::grassmannian: {
      out.descriptor = {"grassmann-rotation", kPi, {1}};
      const std::size_t k = s.k, n_amb = s.n;
      out.sample = [k, n_amb](std::size_t n) {
        std::vector<Point> pts;
        for (std::size_t i = 0; i < n; ++i) {
          const double t = frac_angle(i, n, kPi);
          Point p{SpaceKind::grassmannian, std::vector<double>(n_amb * k, 0.0), 0};
          p.coords[0 * k + 0] = std::cos(t);
          p.coords[1 * k + 0] = std::sin(t);
          for (std::size_t c = 1; c < k; ++c) p.coords[(c + 1) * k + c] = 1.0;
          pts.push_back(std::move(p));
        }
        return pts;
      };
      return out;
    }
    case SpaceKind::flat_torus: {
      const SystoleResult sys = flat_torus_systole(s);
      out.descriptor = {"systole", sys.length, sys.cls.winding};
      out.polygon = systole_loop(s, sys.cls);
      const auto cls = sys.cls.winding;
      out.sample = [cls](std::size_t n) {
        std::vector<Point> pts;
        for (std::size_t i = 0; i < n; ++i) {
          ChartPoint x(cls.size());
          for (std::size_t c = 0; c < cls.size(); ++c)
            x[c] = static_cast<double>(cls[c]) * static_cast<double>(i) / static_cast<double>(n);
          pts.push_back(torus_point(SpaceKind::flat_torus, std::move(x)));
        }
        return pts;
      };
      return out;
    }
    case SpaceKind::revolution_torus: {
      const auto res = shorten_loop(wobbly_outer_equator(s, opts.vertices), opts.shortening);
      out.analytic = false;
      out.descriptor = {"shortened", res.report.final_length, res.report.class_after.winding};
      out.polygon = res.loop;
      const Loop polygon = res.loop;
      out.sample = [polygon](std::size_t n) {
        std::vector<Point> pts;
        for (auto& x : equidistribute(polygon, n)) pts.push_back(torus_point(SpaceKind::revolution_torus, x));
        return pts;
      };
      return out;
    }
    case SpaceKind::hyperboloid:
    case SpaceKind::spd_stein:
    case SpaceKind::finite:
      break;
  }
  throw Error(Errc::unsupported, std::string(to_string(s.kind)) + " has no canonical loop");
}

void validate(const WitnessRequest& req) {
  validate(KernelSpec{req.q, req.lambda});
  if (req.n_max < 4 || req.n_max % 4 != 0)
    throw Error(Errc::invalid_argument, "n_max must be >= 4 and divisible by 4");
}

namespace {

double effective_rate(double lambda, double q, double length) {
  return lambda * std::pow(length / kTwoPi, q);
}

// Ambient space with a grid fine enough that its 3h error stays below L/100.
SpaceSpec ambient_for(const SpaceSpec& s, double length) {
  SpaceSpec out = s;
  if (s.kind == SpaceKind::revolution_torus)
    while (3.0 * out.grid_pitch > length / 100.0) out.grid_pitch *= 0.5;
  return out;
}

void attach_spade(WitnessReport& rep, const CanonicalLoop& loop, const SpaceSpec& ambient,
                  const std::vector<Point>& pts, const DistanceMatrix& ambient_d) {
  SpadeReport spade;
  if (loop.analytic) {
    spade = spade_from_distances(circle_law(pts.size(), loop.descriptor.length), ambient_d, 1e-10);
  } else {
    std::vector<ChartPoint> chart;
    for (const auto& p : pts) chart.push_back(p.coords);
    spade = spade_check(*loop.polygon, chart,
                        [&](const std::vector<Point>&) { return ambient_d; }, 3.0 * ambient.grid_pitch);
  }
  rep.epsilon_observed = spade.epsilon_observed;
  rep.max_abs_deviation = spade.max_abs_deviation;
  if (rep.certificate && rep.q == 2.0)
    rep.lipschitz_consistent =
        rep.certificate->inf_norm_delta <= lipschitz_bound_C0(rep.lambda) * spade.max_abs_deviation + 1e-15;
}

struct Evaluation {
  std::vector<Point> pts;
  DistanceMatrix d{0};
  SymmetricMatrix g{1};
};

Evaluation evaluate(const CanonicalLoop& loop, const SpaceSpec& ambient, std::size_t n, const KernelSpec& k) {
  Evaluation e;
  e.pts = loop.sample(n);
  e.d = pairwise_distances(ambient, e.pts);
  e.g = gram(e.d, k).matrix;
  return e;
}

WitnessReport finite_witness(const WitnessRequest& req, WitnessReport rep) {
  const auto& fs = *req.space.finite;
  rep.loop = {"none", 0.0, {}};
  rep.lambda_eff = req.lambda;
  rep.mode = WitnessMode::direct;
  rep.note = "finite space: leading subsets of the point list, direct eigensolve";
  const KernelSpec k{req.q, req.lambda};
  const std::size_t top = std::min(req.n_max, fs.size());
  for (std::size_t n = 4; n <= top; n += 4) {
    DistanceMatrix d(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, fs.matrix(i, j));
    const double v = jacobi_eigenvalues(gram(d, k).matrix).min();
    rep.trace.push_back({n, v, true});
    if (v < kWitnessThreshold) {
      rep.found = true;
      rep.n = n;
      rep.lambda_min = v;
      for (std::size_t i = 0; i < n; ++i) rep.points.push_back(finite_point(i));
      return rep;
    }
  }
  return rep;
}

}  // namespace

WitnessReport witness_on_circle(double rho, double lambda, std::size_t n_max, double q) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(Errc::invalid_argument, "radius must be > 0");
  WitnessRequest req{SpaceSpec::circle(rho), lambda, q, n_max, WitnessMode::certified, 0, {}};
  validate(req);
  WitnessReport rep;
  rep.space = req.space.describe();
  rep.lambda = lambda;
  rep.q = q;
  rep.loop = {"circle", kTwoPi * rho, {1}};
  rep.lambda_eff = effective_rate(lambda, q, kTwoPi * rho);
  rep.mode = WitnessMode::certified;
  for (std::size_t n = 4; n <= n_max; n += 4) {
    const double v = circulant_min_eigenvalue(circulant_kernel_row(n, rep.lambda_eff, q));
    rep.trace.push_back({n, v, false});
    if (v < kWitnessThreshold) {
      rep.found = true;
      rep.n = n;
      rep.lambda_min = v;
      for (std::size_t i = 0; i < n; ++i) rep.points.push_back(circle_point(frac_angle(i, n, kTwoPi)));
      break;
    }
  }
  return rep;
}

WitnessReport run_witness(const WitnessRequest& req) {
  validate(req);
  WitnessReport rep;
  rep.space = req.space.describe();
  rep.lambda = req.lambda;
  rep.q = req.q;
  rep.mode = req.mode;
  if (req.space.kind == SpaceKind::finite) return finite_witness(req, rep);

  const CanonicalLoop loop = canonical_loop(req.space, req.loop);
  const double length = loop.descriptor.length;
  rep.loop = loop.descriptor;
  rep.lambda_eff = effective_rate(req.lambda, req.q, length);
  const SpaceSpec ambient = ambient_for(req.space, length);
  if (ambient.kind == SpaceKind::revolution_torus) rep.grid_pitch = ambient.grid_pitch;
  const KernelSpec k{req.q, req.lambda};
  const bool use_cert = req.mode != WitnessMode::direct;

  for (std::size_t n = 4; n <= req.n_max; n += 4) {
    const bool use_direct = req.mode == WitnessMode::direct ||
                            (req.mode == WitnessMode::automatic && n <= req.direct_cap);
    std::optional<Evaluation> ev;
    ScanStep step{n, 0.0, false};
    if (use_cert) {
      const auto row = circulant_kernel_row(n, rep.lambda_eff, req.q);
      const Spectrum ks = circulant_spectrum(row);
      step.lambda_min = ks.min();
      if (ks.min() < kWitnessThreshold) {
        ev = evaluate(loop, ambient, n, k);
        const auto cert = weyl_certify(ks, inf_norm_diff(ev->g, circulant_from_row(row)), n);
        rep.certificate = cert;
        if (cert.fires) {
          rep.found = true;
          rep.n = n;
          rep.mode = WitnessMode::certified;
          // Densely confirm when affordable; otherwise report the certified upper bound.
          rep.lambda_min = n <= std::max<std::size_t>(req.direct_cap, 256)
                               ? jacobi_eigenvalues(ev->g).min()
                               : cert.certified_bound;
          step = {n, *rep.lambda_min, n <= std::max<std::size_t>(req.direct_cap, 256)};
          rep.trace.push_back(step);
          rep.points = ev->pts;
          attach_spade(rep, loop, ambient, ev->pts, ev->d);
          return rep;
        }
      }
    }
    if (use_direct) {
      if (!ev) ev = evaluate(loop, ambient, n, k);
      const double v = jacobi_eigenvalues(ev->g).min();
      step = {n, v, true};
      if (v < kWitnessThreshold) {
        rep.trace.push_back(step);
        rep.found = true;
        rep.n = n;
        rep.lambda_min = v;
        rep.mode = WitnessMode::direct;
        rep.points = ev->pts;
        attach_spade(rep, loop, ambient, ev->pts, ev->d);
        return rep;
      }
    }
    rep.trace.push_back(step);
  }
  return rep;
}

WitnessReport certified_run(const SpaceSpec& space, double lambda, std::size_t n, double q,
                            const CanonicalLoopOptions& loop_opts) {
  WitnessRequest req{space, lambda, q, std::max<std::size_t>(n, 4), WitnessMode::certified, 0, loop_opts};
  validate(req);
  if (space.kind == SpaceKind::finite) throw Error(Errc::unsupported, "finite spaces have no canonical loop");
  const CanonicalLoop loop = canonical_loop(space, loop_opts);
  WitnessReport rep;
  rep.space = space.describe();
  rep.lambda = lambda;
  rep.q = q;
  rep.mode = WitnessMode::certified;
  rep.loop = loop.descriptor;
  rep.lambda_eff = effective_rate(lambda, q, loop.descriptor.length);
  const SpaceSpec ambient = ambient_for(space, loop.descriptor.length);
  if (ambient.kind == SpaceKind::revolution_torus) rep.grid_pitch = ambient.grid_pitch;

  const auto row = circulant_kernel_row(n, rep.lambda_eff, q);
  const Spectrum ks = circulant_spectrum(row);
  const Evaluation ev = evaluate(loop, ambient, n, KernelSpec{q, lambda});
  rep.certificate = weyl_certify(ks, inf_norm_diff(ev.g, circulant_from_row(row)), n);
  const double direct = jacobi_eigenvalues(ev.g).min();
  rep.trace.push_back({n, direct, true});
  rep.found = rep.certificate->fires;
  rep.n = n;
  rep.lambda_min = direct;
  rep.points = ev.pts;
  attach_spade(rep, loop, ambient, ev.pts, ev.d);
  return rep;
}

}  // namespace geok
