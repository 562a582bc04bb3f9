#include "doctest.h"
#include "toricgh/distances.hpp"
#include "toricgh/error.hpp"
#include "toricgh/quadrature.hpp"

#include <cmath>
#include <random>

using namespace toricgh;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

HPolytope pentagon(const Rational& t) {
    return HPolytope::from_halfspaces(2, std::vector<Halfspace>{{{1, 0}, 0}, {{0, 1}, 0}, {{-1, 0}, -2},
                                                                {{0, -1}, -1}, {{-1, -1}, t - 3}});
}

HPolytope rectangle() { return HPolytope::box({0, 0}, {2, 1}); }

HPolytope random_polygon(std::mt19937_64& rng, int size = 6) {
    std::uniform_int_distribution<int> c(0, size);
    for (;;) {
        std::vector<RVector> pts;
        for (int i = 0; i < 6; ++i) pts.push_back({c(rng), c(rng)});
        try {
            return halfspace_reconstruction(VPolytope::from_points(2, pts));
        } catch (const Error&) {
        }
    }
}

// Boundary points of a polygon, sampled densely along each edge.
std::vector<Eigen::Vector2d> boundary_samples(const HPolytope& p, int per_edge) {
    std::vector<Eigen::Vector2d> out;
    const FaceLattice lattice(p);
    for (const auto& e : lattice.faces(1)) {
        const Eigen::VectorXd a = to_eigen(p.vertices()[e.vertices[0]]);
        const Eigen::VectorXd b = to_eigen(p.vertices()[e.vertices[1]]);
        for (int s = 0; s <= per_edge; ++s) out.push_back(a + (b - a) * (static_cast<double>(s) / per_edge));
    }
    return out;
}

// Brute-force Hausdorff distance between polygon boundaries (sets are convex, so max over boundaries).
double brute_force_hausdorff(const HPolytope& p, const HPolytope& q) {
    const auto bp = boundary_samples(p, 400);
    const auto bq = boundary_samples(q, 400);
    auto one_sided = [](const HPolytope& target, const std::vector<Eigen::Vector2d>& from,
                        const std::vector<Eigen::Vector2d>& target_boundary) {
        double worst = 0;
        for (const auto& x : from) {
            const double xs[] = {x(0), x(1)};
            if (point_distance(xs, target) == 0) continue;
            double best = 1e300;
            for (const auto& y : target_boundary) best = std::min(best, (x - y).norm());
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(q, bp, bq), one_sided(p, bq, bp));
}

double support(const HPolytope& p, const Eigen::Vector2d& u) {
    double h = -1e300;
    for (const auto& v : p.vertices()) h = std::max(h, to_eigen(v).dot(u));
    return h;
}

}  // namespace

TEST_CASE("Hausdorff distance") {
    const auto sq = HPolytope::box({0, 0}, {1, 1});
    const auto big = HPolytope::box({0, 0}, {2, 2});
    CHECK(d_hausdorff(sq, sq) == 0.0);
    CHECK(d_hausdorff(sq, big) == doctest::Approx(std::sqrt(2.0)));
    CHECK(brute_force_hausdorff(sq, big) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
    for (int k = 1; k <= 4; ++k) {
        const Rational t = q(1, 1L << k);
        const double expected = to_double(t) / std::sqrt(2.0);
        CHECK(d_hausdorff(pentagon(t), rectangle()) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(brute_force_hausdorff(pentagon(t), rectangle()) == doctest::Approx(expected).epsilon(1e-2));
    }
    CHECK_THROWS_AS(d_hausdorff(sq, HPolytope::box({0}, {1})), Error);
}

TEST_CASE("Hausdorff distance equals the support-function gap") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_polygon(rng);
        const auto r = random_polygon(rng);
        // Uniform directions plus the facet normals, where the support-function gap has kinks.
        std::vector<Eigen::Vector2d> dirs;
        for (int s = 0; s < 10000; ++s) {
            const double th = 2 * M_PI * s / 10000.0;
            dirs.emplace_back(std::cos(th), std::sin(th));
        }
        for (const auto* poly : {&p, &r})
            for (const auto& f : poly->facets()) {
                const Eigen::Vector2d nu(f.normal[0].convert_to<double>(), f.normal[1].convert_to<double>());
                dirs.push_back(-nu.normalized());
            }
        double gap = 0;
        for (const auto& u : dirs) gap = std::max(gap, std::abs(support(p, u) - support(r, u)));
        CHECK(d_hausdorff(p, r) == doctest::Approx(gap).epsilon(1e-6));
        CHECK(d_hausdorff(p, r) >= gap - 1e-12);
    }
}

TEST_CASE("volume distance") {
    const auto sq = HPolytope::box({0, 0}, {1, 1});
    CHECK(d_volume(sq, HPolytope::box({0, 0}, {2, 2})) == 3);
    CHECK(d_volume(sq, translate(sq, {2, 0})) == 2);
    for (int k = 1; k <= 6; ++k) {
        const Rational t = q(1, 1L << k);
        CHECK(d_volume(pentagon(t), rectangle()) == t * t / 2);
    }
}

TEST_CASE("metric axioms on random polygons") {
    std::mt19937_64 rng(21);
    std::vector<HPolytope> ps;
    for (int i = 0; i < 6; ++i) ps.push_back(random_polygon(rng, 4));
    WassersteinConfig cfg;
    cfg.h = q(1, 4);
    const std::size_t n = ps.size();
    std::vector<std::vector<WassersteinResult>> w(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w[i].push_back(d_wasserstein(ps[i], ps[j], cfg));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = ps[i];
        CHECK(d_hausdorff(a, a) == 0.0);
        CHECK(d_volume(a, a) == 0);
        CHECK(w[i][i].value <= w[i][i].error_bound);
        for (std::size_t j = 0; j < n; ++j) {
            const auto& b = ps[j];
            CHECK(d_hausdorff(a, b) == d_hausdorff(b, a));
            CHECK(d_volume(a, b) == d_volume(b, a));
            CHECK(w[i][j].value == doctest::Approx(w[j][i].value).epsilon(1e-9));
            for (std::size_t k = 0; k < n; ++k) {
                const auto& c = ps[k];
                CHECK(d_hausdorff(a, c) <= d_hausdorff(a, b) + d_hausdorff(b, c) + 1e-9);
                CHECK(d_volume(a, c) <= d_volume(a, b) + d_volume(b, c));
                CHECK(w[i][k].value <= w[i][j].value + w[j][k].value + w[i][k].error_bound + w[i][j].error_bound +
                                           w[j][k].error_bound + 1e-9);
            }
        }
    }
}

TEST_CASE("discretization") {
    const auto p = pentagon(q(1, 2));
    const auto mu = discretize(p, q(1, 10));
    double total = 0;
    for (double w : mu.weights) {
        CHECK(w > 0);
        total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& x : mu.points) {
        const double xs[] = {x(0), x(1)};
        CHECK(point_distance(xs, p) <= 1e-12);
    }
    // 200 cells of the rectangle; the 10 cells with lower corner on or beyond x + y = 5/2 are cut away.
    CHECK(mu.size() == 190);
    CHECK_THROWS_AS(discretize(p, q(1, 100), 100), Error);
}

TEST_CASE("Wasserstein distance examples") {
    const auto sq = HPolytope::box({0, 0}, {1, 1});
    WassersteinConfig cfg;
    cfg.h = q(1, 10);
    const auto self = d_wasserstein(sq, sq, cfg);
    CHECK(self.value <= self.error_bound);
    CHECK(self.plan.row_residual <= 1e-9);
    CHECK(self.plan.col_residual <= 1e-9);

    const auto shifted = d_wasserstein(sq, translate(sq, {q(3, 10), q(4, 10)}), cfg);
    CHECK(std::abs(shifted.value - 0.5) <= shifted.error_bound);

    // 1D quantile oracle: W2^2 = int_0^1 (u - 2u)^2 du = 1/3.
    WassersteinConfig fine;
    fine.h = q(1, 50);
    const auto seg = d_wasserstein(HPolytope::box({0}, {1}), HPolytope::box({0}, {2}), fine);
    CHECK(std::abs(seg.value - 1 / std::sqrt(3.0)) <= seg.error_bound);
    CHECK(seg.value == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-3));

    WassersteinConfig ent = cfg;
    ent.h = q(1, 5);
    ent.solver = SolverKind::Entropic;
    const auto e = d_wasserstein(sq, translate(sq, {q(1, 2), 0}), ent);
    CHECK(e.solver == "entropic");
    CHECK(std::abs(e.value - 0.5) <= e.error_bound);
    CHECK(e.plan.row_residual <= 1e-6);
    CHECK(e.plan.col_residual <= 1e-6);
}

TEST_CASE("Wasserstein refinement in h") {
    const auto p = pentagon(q(1, 2));
    const auto r = HPolytope::box({q(1, 3), 0}, {2, q(3, 2)});
    double prev = -1;
    for (long d : {4, 8, 16}) {
        WassersteinConfig cfg;
        cfg.h = q(1, d);
        const auto w = d_wasserstein(p, r, cfg);
        if (prev >= 0) CHECK(std::abs(w.value - prev) <= 3.0 / static_cast<double>(d / 2) * std::sqrt(2.0));
        prev = w.value;
    }
}

TEST_CASE("coupling upper bound") {
    const auto p = pentagon(q(1, 2));
    CHECK(wasserstein_upper_bound(rectangle(), rectangle()) == 0.0);
    CHECK(wasserstein_upper_bound(p, rectangle()) == doctest::Approx(202 * std::sqrt(5.0) * std::sqrt(1.0 / 15)));
    CHECK_THROWS_AS(wasserstein_upper_bound(HPolytope::box({0, 0}, {200, 200}), HPolytope::box({0, 0}, {1, 1})),
                    Error);
    std::mt19937_64 rng(33);
    WassersteinConfig cfg;
    cfg.h = q(1, 2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_polygon(rng);
        const auto b = random_polygon(rng);
        const auto w = d_wasserstein(a, b, cfg);
        CHECK(w.value <= wasserstein_upper_bound(a, b) + w.error_bound);
    }
}

TEST_CASE("Monge map estimates") {
    const auto sq = HPolytope::box({0, 0}, {1, 1});
    WassersteinConfig cfg;
    cfg.h = q(1, 10);
    const double slack = 2 * 0.1 * std::sqrt(2.0);
    const auto id = monge_map_estimate(sq, sq, cfg);
    CHECK(id.max_displacement_error([](const Eigen::VectorXd& x) { return x; }) <= slack);
    const Eigen::Vector2d v(0.5, -0.3);
    const auto tr = monge_map_estimate(sq, translate(sq, {q(1, 2), q(-3, 10)}), cfg);
    CHECK(tr.max_displacement_error([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(x + v); }) <= slack);

    WassersteinConfig line;
    line.h = q(1, 40);
    const auto stretch = monge_map_estimate(HPolytope::box({0}, {1}), HPolytope::box({0}, {2}), line);
    CHECK(stretch.max_displacement_error([](const Eigen::VectorXd& x) { return Eigen::VectorXd(2 * x); }) <=
          3 * 0.025);
}

TEST_CASE("test-function dictionary and cubature") {
    const auto p = pentagon(q(1, 4));
    const auto names = test_function_names(2);
    CHECK(names.size() == 1 + 2 + 3 + 1 + 3);
    CHECK(integrate_test_function(p, "one") == doctest::Approx(2 - 1.0 / 32));
    CHECK_THROWS_AS(integrate_test_function(p, "x3"), Error);
    CHECK_THROWS_AS(integrate_test_function(p, "cosine"), Error);

    // Cubature against exact polynomial moments.
    const RawMoments m = raw_moments(p);
    CHECK(integrate_polytope(p, [](const Eigen::VectorXd& x) { return x(0) * x(1); }) ==
          doctest::Approx(to_double(m.second[0][1])).epsilon(1e-12));
    // A degree-9 polynomial integrated on a single simplex: exact value via the
    // Dirichlet formula int_T x^a = a! / (a + 2)! on the unit triangle.
    const std::vector<Eigen::VectorXd> tri{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
    CHECK(integrate_simplex(tri, [](const Eigen::VectorXd& x) { return std::pow(x(0), 9); }, 4) ==
          doctest::Approx(1.0 / 110).epsilon(1e-12));

    // Bumps against Monte Carlo.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(0, 2), uy(0, 1);
    const int n = 400000;
    double acc = 0;
    const Eigen::Vector2d c(1.5, 0.5);
    for (int i = 0; i < n; ++i) {
        const double x = ux(rng), y = uy(rng);
        if (x + y > 3 - 0.25) continue;
        acc += std::exp(-((x - c(0)) * (x - c(0)) + (y - c(1)) * (y - c(1))) / (2 * 0.09));
    }
    CHECK(integrate_test_function(p, "bump2") == doctest::Approx(2.0 * acc / n).epsilon(1e-2));
}

TEST_CASE("W2 convergence report") {
    WassersteinConfig cfg;
    cfg.h = q(1, 5);
    const auto r = rectangle();
    const auto constant = w2_convergence_check({r, r}, r, cfg);
    for (const auto& row : constant.rows) CHECK(row.max_discrepancy == 0.0);

    std::vector<HPolytope> shifted;
    for (int i = 1; i <= 3; ++i) shifted.push_back(translate(r, {q(1, i), 0}));
    const auto rep = w2_convergence_check(shifted, r, cfg);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) CHECK(rep.rows[i].discrepancy[1] == doctest::Approx(1.0 / (i + 1)));
    CHECK(rep.common_radius >= std::sqrt(5.0));
}

TEST_CASE("pentagon family: all three distances decrease to zero") {
    WassersteinConfig cfg;
    cfg.h = q(1, 10);
    double ph = 1e300, pv = 1e300, pw = 1e300;
    const double constant = 202 * std::sqrt(5.0) / std::sqrt(to_double(volume(pentagon(q(1, 2)))));
    for (int k = 1; k <= 8; ++k) {
        const auto p = pentagon(q(1, 1L << k));
        const double h = d_hausdorff(p, rectangle());
        const double v = to_double(d_volume(p, rectangle()));
        const double w = d_wasserstein(p, rectangle(), cfg).value;
        CHECK(h < ph);
        CHECK(v < pv);
        CHECK(w < pw);
        CHECK(w / std::sqrt(v) <= constant);
        ph = h;
        pv = v;
        pw = w;
    }
    CHECK(ph < 1e-2);
    CHECK(pw < 1e-3);
}
