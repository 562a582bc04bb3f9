#include "doctest.h"
#include "toricgh/error.hpp"
#include "toricgh/guillemin.hpp"
#include "toricgh/manifold_sample.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace toricgh;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

GuilleminChart chart_of(const HPolytope& p) { return GuilleminChart(DelzantPolytope::from(p)); }

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

HPolytope polygon(const std::vector<RVector>& pts) { return halfspace_reconstruction(VPolytope::from_points(2, pts)); }

// Delzant seeds: square, simplex, pentagon, two Hirzebruch trapezoids.
std::vector<HPolytope> delzant_seeds() {
    return {HPolytope::box({0, 0}, {1, 1}),
            polygon({{0, 0}, {2, 0}, {0, 2}}),
            polygon({{0, 0}, {2, 0}, {2, q(1, 2)}, {q(3, 2), 1}, {0, 1}}),
            polygon({{0, 0}, {3, 0}, {2, 1}, {0, 1}}),
            polygon({{0, 0}, {4, 0}, {2, 1}, {0, 1}})};
}

HPolytope random_delzant_polygon(std::mt19937_64& rng, std::size_t seed_index) {
    std::uniform_int_distribution<int> e(-1, 1);
    for (;;) {
        IMatrix a{{e(rng), e(rng)}, {e(rng), e(rng)}};
        const Integer det = determinant(a);
        if (det == 1 || det == -1) return apply_map(delzant_seeds()[seed_index], UnimodularAffineMap(a, {q(1, 3), q(-1, 2)}));
    }
}

// Dirichlet-weighted convex combination of the vertices at Euclidean distance >= min_dist from the
// boundary (the difference quotient's own truncation error grows like (step / distance)^2).
Eigen::VectorXd random_interior_point(std::mt19937_64& rng, const HPolytope& p, double min_dist) {
    std::gamma_distribution<double> gamma(2.0, 1.0);
    for (;;) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.dim()));
        double total = 0;
        for (const auto& v : p.vertices()) {
            const double w = gamma(rng);
            x += w * to_eigen(v);
            total += w;
        }
        x /= total;
        bool ok = true;
        for (const auto& f : p.facets()) {
            double l = -to_double(f.offset), norm = 0;
            for (std::size_t k = 0; k < p.dim(); ++k) {
                const double c = f.normal[k].convert_to<double>();
                l += c * x(static_cast<Eigen::Index>(k));
                norm += c * c;
            }
            ok = ok && l >= min_dist * std::sqrt(norm);
        }
        if (ok) return x;
    }
}

Eigen::MatrixXd finite_difference_hessian(const GuilleminChart& c, const Eigen::VectorXd& x, double h) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            Eigen::VectorXd ei = Eigen::VectorXd::Unit(n, i) * h, ej = Eigen::VectorXd::Unit(n, j) * h;
            out(i, j) = (c.potential(x + ei + ej) - c.potential(x + ei - ej) - c.potential(x - ei + ej) +
                         c.potential(x - ei - ej)) /
                        (4 * h * h);
        }
    }
    return out;
}

double vertex_to_vertex(const HPolytope& segment, double h, double delta, int m) {
    SampleConfig cfg;
    cfg.h = Rational(1, std::lround(1 / h));
    cfg.delta = Rational(1, std::lround(1 / delta));
    cfg.torus_res = m;
    const auto s = ToricManifoldSample::build(chart_of(segment), cfg);
    return s.distance(s.vertex_node(0), s.vertex_node(1));
}

}  // namespace

TEST_CASE("potential and Hessian closed forms") {
    const auto seg = chart_of(HPolytope::box({0}, {1}));
    CHECK(seg.potential(vec({0.5})) == doctest::Approx(-std::log(2.0) / 2).epsilon(1e-14));
    CHECK(seg.hessian(vec({0.5})).g(0, 0) == doctest::Approx(2.0).epsilon(1e-14));

    const auto sq = chart_of(HPolytope::box({0, 0}, {1, 1}));
    CHECK(sq.potential(vec({0.5, 0.5})) == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
    const auto g = sq.hessian(vec({0.5, 0.5}));
    CHECK(g.g(0, 0) == doctest::Approx(2.0));
    CHECK(g.g(1, 1) == doctest::Approx(2.0));
    CHECK(std::abs(g.g(0, 1)) < 1e-15);

    for (long lam : {1L, 2L, 5L}) {
        const auto c = chart_of(HPolytope::box({0}, {lam}));
        const double x = lam / 2.0;
        CHECK(c.hessian(vec({x})).g(0, 0) == doctest::Approx(0.5 * (1 / x + 1 / (lam - x))).epsilon(1e-14));
        CHECK(c.orbit_volume(vec({x})) == doctest::Approx(std::sqrt(lam / 2.0)).epsilon(1e-14));
    }
    CHECK(sq.orbit_volume(vec({0.5, 0.5})) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("boundary and exterior points are rejected") {
    const auto sq = chart_of(HPolytope::box({0, 0}, {1, 1}));
    for (const auto& x : {vec({0.0, 0.5}), vec({1.0, 0.3}), vec({1.5, 0.5})}) {
        CHECK_THROWS_AS(sq.potential(x), Error);
        CHECK_THROWS_AS(sq.hessian(x), Error);
        CHECK_THROWS_AS(sq.orbit_volume(x), Error);
    }
    try {
        sq.potential(vec({0.0, 0.5}));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BoundaryOrExterior);
    }
    CHECK_THROWS_AS(sq.metric_length({{vec({0.5, 0.5}), vec({0, 0})}, {vec({0.5, 1.0}), vec({0, 0})}}), Error);
}

TEST_CASE("analytic Hessian matches central differences on random Delzant polygons") {
    std::mt19937_64 rng(7);
    double worst = 0;
    for (std::size_t k = 0; k < 5; ++k) {
        const HPolytope p = random_delzant_polygon(rng, k);
        REQUIRE(is_delzant(p).pass);
        const auto c = chart_of(p);
        for (int i = 0; i < 100; ++i) {
            const Eigen::VectorXd x = random_interior_point(rng, p, 0.1);
            const auto g = c.hessian(x);
            const Eigen::MatrixXd fd = finite_difference_hessian(c, x, 1e-4);
            worst = std::max(worst, (fd - g.g).cwiseAbs().maxCoeff() / g.g.cwiseAbs().maxCoeff());
            CHECK((g.g - g.g.transpose()).cwiseAbs().maxCoeff() == 0.0);
            CHECK((g.g * g.g_inv - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(Eigen::LLT<Eigen::MatrixXd>(g.g).info() == Eigen::Success);
        }
    }
    MESSAGE("max relative Hessian error " << worst);
    CHECK(worst <= 1e-6);
}

TEST_CASE("smallest eigenvalue grows toward a facet") {
    const auto c = chart_of(polygon({{0, 0}, {2, 0}, {2, q(1, 2)}, {q(3, 2), 1}, {0, 1}}));
    double prev = 0;
    for (int k = 1; k <= 12; ++k) {
        const double d = std::pow(2.0, -k);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.hessian(vec({1.0, d})).g);
        CHECK(es.eigenvalues().minCoeff() >= prev);
        prev = es.eigenvalues().minCoeff();
    }
}

TEST_CASE("metric length oracles") {
    const auto sq = chart_of(HPolytope::box({0, 0}, {1, 1}));
    CHECK(sq.metric_length({}) == 0.0);
    CHECK(sq.metric_length({{vec({0.5, 0.5}), vec({0, 0})}}) == 0.0);

    // Fiber loop y: 0 -> (1,0) traversed in 8 steps at the centre.
    std::vector<PathPoint> loop;
    for (int i = 0; i <= 8; ++i) loop.push_back({vec({0.5, 0.5}), vec({i / 8.0, 0})});
    CHECK(sq.metric_length(loop) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));

    // Base path across [0, lam]: pi sqrt(lam/2), endpoints approached in the interior.
    for (long lam : {2L, 8L}) {
        const auto c = chart_of(HPolytope::box({0}, {lam}));
        auto across = [&](int pieces) {
            std::vector<PathPoint> path;
            for (int i = 0; i <= pieces; ++i) {
                // Chebyshev-like spacing clusters points at both ends where the integrand blows up.
                const double t = 0.5 - 0.5 * std::cos(std::numbers::pi * i / pieces);
                path.push_back({vec({lam * (1e-12 + (1 - 2e-12) * t)}), vec({0})});
            }
            return c.metric_length(path);
        };
        const double coarse = across(2000), fine = across(4000);
        CHECK(fine == doctest::Approx(std::numbers::pi * std::sqrt(lam / 2.0)).epsilon(1e-3));
        CHECK(std::abs(fine - coarse) <= 0.01 * fine);
    }

    // Radial integral from a vertex agrees with a finely subdivided interior path plus its tail.
    const auto seg = chart_of(HPolytope::box({0}, {2}));
    CHECK(seg.radial_length(vec({0}), vec({1})) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
    CHECK(seg.radial_length(vec({2}), vec({1})) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
}

TEST_CASE("orbit volume against fiber loop lengths") {
    const auto c = chart_of(HPolytope::box({0, 0}, {1, 2}));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int i = 0; i < 20; ++i) {
        const Eigen::VectorXd x = vec({u(rng), 2 * u(rng)});
        double product = 1;
        for (int k = 0; k < 2; ++k) {
            std::vector<PathPoint> loop;
            for (int j = 0; j <= 16; ++j) {
                Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
                y(k) = j / 16.0;
                loop.push_back({x, y});
            }
            product *= c.metric_length(loop);
        }
        CHECK(c.orbit_volume(x) == doctest::Approx(product).epsilon(0.02));
    }
}

TEST_CASE("orbit volume decreases toward every facet of the square") {
    const auto c = chart_of(HPolytope::box({0, 0}, {1, 1}));
    const double centre = c.orbit_volume(vec({0.5, 0.5}));
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> scans = {
        {vec({0, 0.5}), vec({1, 0})}, {vec({1, 0.5}), vec({-1, 0})}, {vec({0.5, 0}), vec({0, 1})}, {vec({0.5, 1}), vec({0, -1})}};
    for (const auto& [foot, inward] : scans) {
        std::vector<double> values;
        for (int k = 1; k <= 40; ++k) values.push_back(c.orbit_volume(foot + 0.5 * std::pow(10.0, -4.0 * k / 40) * inward));
        for (std::size_t i = values.size() - 10; i < values.size(); ++i) CHECK(values[i] < values[i - 1]);
        // det G = (1/(2d) + 1/(2(1-d))) * 2 near the facet, so the ratio at d = 1e-4 is about sqrt(2e-4)/sqrt(1/2).
        const double d = 1e-4;
        const double exact = 1 / std::sqrt((0.5 / d + 0.5 / (1 - d)) * 2.0);
        CHECK(c.orbit_volume(foot + d * inward) == doctest::Approx(exact).epsilon(1e-12));
        CHECK(c.orbit_volume(foot + d * inward) / centre == doctest::Approx(0.02).epsilon(1e-3));
    }
}

TEST_CASE("fixed points and Euler characteristic") {
    CHECK(fixed_points(DelzantPolytope::from(HPolytope::box({0, 0}, {1, 1}))).euler_characteristic == 4);
    CHECK(fixed_points(DelzantPolytope::from(polygon({{0, 0}, {1, 0}, {0, 1}}))).euler_characteristic == 3);
    const auto pent = polygon({{0, 0}, {2, 0}, {2, q(1, 2)}, {q(3, 2), 1}, {0, 1}});
    const auto fp = fixed_points(DelzantPolytope::from(pent));
    CHECK(fp.euler_characteristic == 5);
    CHECK(fp.moment_images.size() == 5);
    CHECK(fixed_points(DelzantPolytope::from(HPolytope::box({0, 0, 0}, {1, 1, 1}))).euler_characteristic == 8);
}

TEST_CASE("torus difference picks the shortest representative") {
    const Eigen::VectorXd d = torus_difference(vec({0.75, -0.75, 0.25, 0.5}));
    CHECK(d(0) == doctest::Approx(-0.25));
    CHECK(d(1) == doctest::Approx(0.25));
    CHECK(d(2) == doctest::Approx(0.25));
    CHECK(std::abs(d(3)) == doctest::Approx(0.5));
}

TEST_CASE("sample measure is the exact volume of P") {
    for (const auto& p : delzant_seeds()) {
        SampleConfig cfg;
        cfg.h = q(1, 10);
        cfg.delta = q(1, 10);
        cfg.torus_res = 2;
        const auto s = ToricManifoldSample::build(chart_of(p), cfg);
        CHECK(s.total_measure() == volume(p));
        double sum = 0;
        for (std::size_t u = 0; u < s.node_count(); ++u) sum += s.measure(u);
        CHECK(sum == doctest::Approx(to_double(volume(p))).epsilon(1e-12));
        for (std::size_t b = 0; b < s.base_count(); ++b) {
            const Eigen::VectorXd x = s.base_points()[b];
            for (const auto& f : p.facets()) {
                double l = -to_double(f.offset);
                for (std::size_t k = 0; k < 2; ++k) l += f.normal[k].convert_to<double>() * x(static_cast<Eigen::Index>(k));
                CHECK(l >= 0.1 - 1e-9);
            }
        }
    }
}

TEST_CASE("sample configuration errors") {
    const auto c = chart_of(HPolytope::box({0, 0}, {1, 1}));
    auto kind = [&](SampleConfig cfg) {
        try {
            ToricManifoldSample::build(c, cfg);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidInput;
    };
    SampleConfig cfg;
    cfg.h = q(1, 5);
    CHECK(kind(cfg) == ErrorKind::BadConfig);  // h > delta
    cfg.h = 0;
    CHECK(kind(cfg) == ErrorKind::BadConfig);
    cfg.h = q(1, 10);
    cfg.delta = q(1, 2);
    CHECK(kind(cfg) == ErrorKind::BadConfig);  // inset is a point
    cfg.delta = q(1, 10);
    cfg.torus_res = 0;
    CHECK(kind(cfg) == ErrorKind::BadConfig);
    cfg.torus_res = 64;
    CHECK(kind(cfg) == ErrorKind::TooLarge);
}

TEST_CASE("sample metric: symmetry, triangle inequality, exact shift isometry") {
    SampleConfig cfg;
    cfg.h = q(1, 5);
    cfg.delta = q(1, 5);
    cfg.torus_res = 3;
    const auto s = ToricManifoldSample::build(chart_of(polygon({{0, 0}, {2, 0}, {2, q(1, 2)}, {q(3, 2), 1}, {0, 1}})), cfg);
    const std::size_t n = s.node_count();
    for (std::size_t a = 0; a < n; ++a) {
        CHECK(s.distance(a, a) == 0.0);
        for (std::size_t b = 0; b < n; ++b) {
            REQUIRE(s.distance(a, b) == s.distance(b, a));
            REQUIRE(std::isfinite(s.distance(a, b)));
            if (a != b) REQUIRE(s.distance(a, b) > 0);
            for (std::size_t g = 0; g < 2; ++g) REQUIRE(s.distance(s.shift(a, g), s.shift(b, g)) == s.distance(a, b));
        }
    }
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int i = 0; i < 20000; ++i) {
        const std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
        REQUIRE(s.distance(a, c) <= s.distance(a, b) + s.distance(b, c) + 1e-12);
    }
    for (std::size_t a = 0; a < n; ++a) CHECK(s.shift(a, 1, 3) == a);
    for (std::size_t v = 0; v < s.vertex_count(); ++v) CHECK(s.shift(s.vertex_node(v), 0) == s.vertex_node(v));
}

TEST_CASE("fiber-antipodal distance on the segment [0,2]") {
    SampleConfig cfg;
    cfg.h = q(1, 20);
    cfg.delta = q(1, 20);
    cfg.torus_res = 16;
    const auto c = chart_of(HPolytope::box({0}, {2}));
    const auto s = ToricManifoldSample::build(c, cfg);
    std::size_t centre = 0;
    for (std::size_t b = 0; b < s.base_count(); ++b)
        if (std::abs(s.base_points()[b](0) - 1) < std::abs(s.base_points()[centre](0) - 1)) centre = b;
    const double bound = std::sqrt(c.hessian(vec({1.0})).g_inv(0, 0)) / 2;
    CHECK(s.distance(s.node(centre, 0), s.node(centre, 8)) <= bound + 1e-12);
}

TEST_CASE("segment geodesic between the fixed points approaches pi") {
    const auto seg = HPolytope::box({0}, {2});
    const double coarse = vertex_to_vertex(seg, 0.1, 0.1, 8);
    const double mid = vertex_to_vertex(seg, 0.05, 0.05, 16);
    const double fine = vertex_to_vertex(seg, 0.02, 0.02, 32);
    MESSAGE("vertex distances " << coarse << " " << mid << " " << fine);
    CHECK(std::abs(fine - std::numbers::pi) <= 0.05 * std::numbers::pi);
    CHECK(std::abs(fine - std::numbers::pi) <= std::abs(mid - std::numbers::pi));
    CHECK(std::abs(mid - std::numbers::pi) <= std::abs(coarse - std::numbers::pi));
}

TEST_CASE("sample binary round trip") {
    SampleConfig cfg;
    cfg.h = q(1, 4);
    cfg.delta = q(1, 4);
    cfg.torus_res = 3;
    const auto s = ToricManifoldSample::build(chart_of(HPolytope::box({0, 0}, {1, 2})), cfg);
    std::stringstream buf;
    s.write(buf);
    const auto r = ToricManifoldSample::read(buf);
    REQUIRE(r.node_count() == s.node_count());
    CHECK(r.polytope().same_set(s.polytope()));
    CHECK(r.total_measure() == s.total_measure());
    CHECK(r.targets() == s.targets());
    CHECK(r.weights() == s.weights());
    for (std::size_t a = 0; a < s.node_count(); ++a)
        for (std::size_t b = 0; b < s.node_count(); ++b) REQUIRE(r.distance(a, b) == s.distance(a, b));
    std::stringstream bad("XXXX");
    CHECK_THROWS_AS(ToricManifoldSample::read(bad), Error);
}
