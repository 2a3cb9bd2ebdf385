#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>

#include "geok/error.hpp"
#include "geok/spaces.hpp"

using namespace geok;

namespace {

template <class F>
Errc error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected geok::Error";
  return Errc::invalid_argument;
}

Eigen::VectorXd vec(const Point& p) { return Eigen::Map<const Eigen::VectorXd>(p.coords.data(), p.coords.size()); }

Eigen::MatrixXd mat(const Point& p, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = p.coords[i * cols + j];
  return m;
}

double logdet(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

// Closed forms evaluated the textbook way, for well-separated points.
double textbook(const SpaceSpec& s, const Point& p, const Point& q) {
  switch (s.kind) {
    case SpaceKind::sphere: return std::acos(std::clamp(vec(p).dot(vec(q)), -1.0, 1.0));
    case SpaceKind::projective: return std::acos(std::min(1.0, std::abs(vec(p).dot(vec(q)))));
    case SpaceKind::hyperboloid: {
      const auto a = vec(p), b = vec(q);
      return std::acosh(std::max(1.0, a(0) * b(0) - a.tail(a.size() - 1).dot(b.tail(b.size() - 1))));
    }
    case SpaceKind::grassmannian: {
      const Eigen::MatrixXd m = mat(p, s.n, s.k).transpose() * mat(q, s.n, s.k);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
      double sum = 0.0;
      for (int i = 0; i < svd.singularValues().size(); ++i) {
        const double t = std::acos(std::min(1.0, svd.singularValues()(i)));
        sum += t * t;
      }
      return std::sqrt(sum);
    }
    case SpaceKind::spd_stein: {
      const auto x = mat(p, s.n, s.n), y = mat(q, s.n, s.n);
      return std::sqrt(std::max(0.0, logdet(0.5 * (x + y)) - 0.5 * (logdet(x) + logdet(y))));
    }
    case SpaceKind::flat_torus: {
      // Brute force over a generous box of lattice translates.
      const std::size_t d = s.d;
      double best = INFINITY;
      std::vector<int> k(d, -4);
      while (true) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t c = 0; c < d; ++c) x(c) += (p.coords[r] - q.coords[r] + k[r]) * s.basis[r * d + c];
        best = std::min(best, x.norm());
        std::size_t i = 0;
        while (i < d && k[i] == 4) k[i++] = -4;
        if (i == d) break;
        ++k[i];
      }
      return best;
    }
    default: return NAN;
  }
}

std::vector<SpaceSpec> closed_form_spaces() {
  return {SpaceSpec::circle(1.7),
          SpaceSpec::sphere(2),
          SpaceSpec::sphere(5),
          SpaceSpec::projective(3),
          SpaceSpec::flat_torus(2, {1.0, 0.0, 0.3, 1.2}),
          SpaceSpec::flat_torus(3, {1, 0, 0, 0, 2, 0, 0.4, 0.3, 2.0}),
          SpaceSpec::hyperboloid(3),
          SpaceSpec::grassmannian(2, 4),
          SpaceSpec::grassmannian(3, 6),
          SpaceSpec::spd_stein(3)};
}

}  // namespace

TEST(ParseSpace, AllKindsRoundTrip) {
  for (const char* text : {"circle:2", "sphere:2", "projective:3", "flat-torus:1,0,0,5", "rev-torus:3,1",
                           "grassmann:1,3", "hyperboloid:2", "spd-stein:3"}) {
    const auto s = parse_space(text);
    EXPECT_EQ(s.describe(), text);
    EXPECT_EQ(parse_space(s.describe()).describe(), text);
  }
  const auto t = parse_space("flat-torus:1,0,0,5");
  EXPECT_EQ(t.d, 2u);
  EXPECT_EQ(t.basis, (std::vector<double>{1, 0, 0, 5}));
}

TEST(ParseSpace, Errors) {
  EXPECT_EQ(error_code([] { parse_space("torus"); }), Errc::parse_error);
  EXPECT_EQ(error_code([] { parse_space("klein:2"); }), Errc::parse_error);
  EXPECT_EQ(error_code([] { parse_space("sphere:x"); }), Errc::parse_error);
  EXPECT_EQ(error_code([] { parse_space("rev-torus:3"); }), Errc::parse_error);
  EXPECT_EQ(error_code([] { parse_space("rev-torus:1,3"); }), Errc::invalid_argument);
  EXPECT_EQ(error_code([] { parse_space("grassmann:3,3"); }), Errc::invalid_argument);
  EXPECT_EQ(error_code([] { parse_space("circle:-1"); }), Errc::invalid_argument);
  EXPECT_EQ(error_code([] { parse_space("flat-torus:1,0,5,1"); }), Errc::invalid_argument);  // not LLL-reduced
  EXPECT_EQ(error_code([] { parse_space("finite:/nonexistent/file"); }), Errc::parse_error);
}

TEST(Lll, ReducedBases) {
  EXPECT_TRUE(is_lll_reduced(2, {1, 0, 0, 5}));
  EXPECT_TRUE(is_lll_reduced(2, {1, 0, 0.5, 1}));
  EXPECT_FALSE(is_lll_reduced(2, {1, 0, 5, 1}));
  EXPECT_FALSE(is_lll_reduced(2, {1, 0, 2, 0}));
}

TEST(Points, Validation) {
  const auto sphere = SpaceSpec::sphere(2);
  EXPECT_NO_THROW(validate_point(sphere, unit_vector_point(SpaceKind::sphere, {3, 0, 4})));
  EXPECT_EQ(error_code([&] { validate_point(sphere, Point{SpaceKind::sphere, {1, 1, 0}, 0}); }),
            Errc::invalid_point);
  EXPECT_EQ(error_code([&] { validate_point(sphere, circle_point(0.3)); }), Errc::kind_mismatch);
  EXPECT_EQ(error_code([&] { validate_point(sphere, Point{SpaceKind::sphere, {1, 0}, 0}); }), Errc::invalid_point);
  const auto t = torus_point(SpaceKind::flat_torus, {1.25, -0.25});
  EXPECT_DOUBLE_EQ(t.coords[0], 0.25);
  EXPECT_DOUBLE_EQ(t.coords[1], 0.75);
  const auto h = SpaceSpec::hyperboloid(2);
  EXPECT_EQ(error_code([&] { validate_point(h, Point{SpaceKind::hyperboloid, {-1, 0, 0}, 0}); }),
            Errc::invalid_point);
}

TEST(Distance, CircleClosedForm) {
  const auto s = SpaceSpec::circle(2.0);
  EXPECT_DOUBLE_EQ(distance(s, circle_point(0.1), circle_point(0.4)), 2.0 * 0.3);
  EXPECT_NEAR(distance(s, circle_point(0.1), circle_point(6.2)), 2.0 * (kTwoPi - 6.1), 1e-14);
  EXPECT_NEAR(distance(s, circle_point(0.0), circle_point(kPi)), 2.0 * kPi, 1e-14);
}

TEST(Distance, MatchesTextbookFormulas) {
  for (const auto& s : closed_form_spaces()) {
    if (s.kind == SpaceKind::circle) continue;
    const auto pts = sample_points(s, 30, 99);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double want = textbook(s, pts[i], pts[i + 1]);
      EXPECT_NEAR(distance(s, pts[i], pts[i + 1]), want, 1e-9 * std::max(1.0, want)) << s.describe();
    }
  }
}

TEST(Distance, ExtremesAreAccurate) {
  const auto s = SpaceSpec::sphere(2);
  const auto p = unit_vector_point(SpaceKind::sphere, {1, 0, 0});
  EXPECT_EQ(distance(s, p, p), 0.0);
  EXPECT_DOUBLE_EQ(distance(s, p, unit_vector_point(SpaceKind::sphere, {-1, 0, 0})), kPi);
  const auto tiny = unit_vector_point(SpaceKind::sphere, {std::cos(1e-9), std::sin(1e-9), 0});
  EXPECT_NEAR(distance(s, p, tiny), 1e-9, 1e-22);

  const auto rp = SpaceSpec::projective(2);
  EXPECT_EQ(distance(rp, unit_vector_point(SpaceKind::projective, {1, 0, 0}),
                     unit_vector_point(SpaceKind::projective, {-1, 0, 0})),
            0.0);
  EXPECT_DOUBLE_EQ(distance(rp, unit_vector_point(SpaceKind::projective, {1, 0, 0}),
                            unit_vector_point(SpaceKind::projective, {0, 1, 0})),
                   kPi / 2);
}

TEST(Distance, MetricAxiomsOnRandomTriples) {
  for (const auto& s : closed_form_spaces()) {
    const auto pts = sample_points(s, 24, 7);
    const auto d = pairwise_distances(s, pts);
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_EQ(d(i, i), 0.0);
      for (std::size_t j = 0; j < d.size(); ++j) EXPECT_EQ(d(i, j), d(j, i));
    }
    EXPECT_TRUE(validate_metric(d, 1e-8).empty()) << s.describe();
  }
}

TEST(Distance, Diameters) {
  const std::pair<SpaceSpec, double> cases[] = {
      {SpaceSpec::sphere(3), kPi},
      {SpaceSpec::projective(3), kPi / 2},
      {SpaceSpec::grassmannian(2, 5), std::sqrt(2.0) * kPi / 2},
      {SpaceSpec::flat_torus(2, {1, 0, 0, 5}), 0.5 * std::sqrt(26.0)},
  };
  for (const auto& [s, diam] : cases) {
    const auto d = pairwise_distances(s, sample_points(s, 40, 3));
    for (double v : d.dense()) EXPECT_LE(v, diam + 1e-12) << s.describe();
  }
}

TEST(Distance, SphereRotationInvariance) {
  const auto s = SpaceSpec::sphere(3);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(4, 4);
  for (int i = 0; i < 16; ++i) a(i / 4, i % 4) = g(rng);
  const Eigen::MatrixXd rot = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
  const auto pts = sample_points(s, 12, 8);
  std::vector<Point> moved;
  for (const auto& p : pts) {
    const Eigen::VectorXd v = rot * vec(p);
    moved.push_back(unit_vector_point(SpaceKind::sphere, std::vector<double>(v.data(), v.data() + 4)));
  }
  const auto d0 = pairwise_distances(s, pts), d1 = pairwise_distances(s, moved);
  for (std::size_t i = 0; i < d0.dense().size(); ++i) EXPECT_NEAR(d0.dense()[i], d1.dense()[i], 1e-10);
}

TEST(Distance, GrassmannLinesAreProjectivePoints) {
  const auto gr = SpaceSpec::grassmannian(1, 4);
  const auto rp = SpaceSpec::projective(3);
  const auto pts = sample_points(gr, 20, 12);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto a = unit_vector_point(SpaceKind::projective, pts[i].coords);
    const auto b = unit_vector_point(SpaceKind::projective, pts[i + 1].coords);
    EXPECT_NEAR(distance(gr, pts[i], pts[i + 1]), distance(rp, a, b), 1e-12);
  }
}

TEST(Distance, FlatTorusLatticeReduction) {
  const auto s = SpaceSpec::flat_torus(2, {1, 0, 0, 5});
  const auto p = torus_point(SpaceKind::flat_torus, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(distance(s, p, torus_point(SpaceKind::flat_torus, {0.75, 0.0})), 0.25);
  EXPECT_DOUBLE_EQ(distance(s, p, torus_point(SpaceKind::flat_torus, {0.5, 0.1})), std::hypot(0.5, 0.5));
}

TEST(Distance, RevolutionTorusAgainstClosedForms) {
  const auto s = SpaceSpec::revolution_torus(3, 1);
  const double h = s.grid_pitch;
  // Meridians are geodesics.
  const auto pt = [](double th, double ph) { return torus_point(SpaceKind::revolution_torus, {th, ph}); };
  const double meridian = distance(s, pt(0.0, 0.0), pt(kPi / 2, 0.0));
  EXPECT_GE(meridian, kPi / 2 - 1e-12);
  EXPECT_LE(meridian, kPi / 2 + 3 * h);
  // Antipodes on the inner equator: the inner equator itself is shortest.
  const double inner = distance(s, pt(kPi, 0.0), pt(kPi, kPi));
  EXPECT_GE(inner, 2 * kPi - 1e-12);
  EXPECT_LE(inner, 2 * kPi + 3 * h);
  // Off-grid points and symmetry.
  const auto a = pt(0.3, 1.1), b = pt(2.9, 4.0);
  EXPECT_NEAR(distance(s, a, b), distance(s, b, a), 1e-12);
  EXPECT_EQ(distance(s, a, a), 0.0);
}

TEST(Sampling, DeterministicAndValid) {
  for (const auto& s : closed_form_spaces()) {
    const auto a = sample_points(s, 10, 123), b = sample_points(s, 10, 123), c = sample_points(s, 10, 124);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    for (const auto& p : a) EXPECT_NO_THROW(validate_point(s, p)) << s.describe();
  }
}

TEST(FiniteMetric, ValidateMetricExample) {
  const auto d = DistanceMatrix::from_dense(3, {0, 1, 3, 1, 0, 1, 3, 1, 0});
  const auto v = validate_metric(d, 0.0);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], (MetricViolation{0, 2, 1}));
  EXPECT_TRUE(validate_metric(d, 1.0).empty());
}

TEST(FiniteMetric, FromDenseRejectsBadMatrices) {
  EXPECT_EQ(error_code([] { DistanceMatrix::from_dense(2, {0, 1, 2, 0}); }), Errc::invalid_argument);
  EXPECT_EQ(error_code([] { DistanceMatrix::from_dense(2, {1, 1, 1, 0}); }), Errc::invalid_argument);
  EXPECT_EQ(error_code([] { DistanceMatrix::from_dense(2, {0, -1, -1, 0}); }), Errc::invalid_argument);
}

TEST(FiniteMetric, ParsesBothRowLayouts) {
  std::istringstream strict("# path\n3\n1\n2 1\n");
  std::istringstream inclusive("3\n0\n1 0\n2 1 0\n");
  const auto a = read_distance_matrix(strict), b = read_distance_matrix(inclusive);
  EXPECT_EQ(a.dense(), b.dense());
  EXPECT_EQ(a(0, 2), 2.0);
  EXPECT_EQ(a(2, 1), 1.0);
}

TEST(FiniteMetric, ParseErrors) {
  for (const char* text : {"", "3\n1\n", "3\n1\n2 x\n", "2\n-1\n", "3\n1\n2 1 4\n", "two\n"}) {
    std::istringstream in(text);
    EXPECT_EQ(error_code([&] { read_distance_matrix(in); }), Errc::parse_error) << '"' << text << '"';
  }
  std::istringstream bad("3\n1\n3 1\n");
  EXPECT_EQ(error_code([&] { parse_finite_metric(bad); }), Errc::metric_violation);
}

TEST(FiniteMetric, WriteReadRoundTrip) {
  const auto s = SpaceSpec::sphere(2);
  const auto d = pairwise_distances(s, sample_points(s, 9, 1));
  std::ostringstream out;
  write_finite_metric(out, d);
  std::istringstream in(out.str());
  const auto fm = parse_finite_metric(in, "mem");
  EXPECT_EQ(fm.matrix.dense(), d.dense());

  const auto space = SpaceSpec::finite_space(std::make_shared<FiniteMetricSpace>(fm));
  const auto pts = sample_points(space, 9, 5);
  EXPECT_EQ(error_code([&] { sample_points(space, 10, 5); }), Errc::unsupported);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      EXPECT_EQ(distance(space, pts[i], pts[j]), d(pts[i].index, pts[j].index));
}
