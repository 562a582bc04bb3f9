#include "doctest.h"
#include "toricgh/error.hpp"
#include "toricgh/polytope.hpp"

#include <cmath>
#include <random>

using namespace toricgh;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

HPolytope pentagon(const Rational& t) {
    return HPolytope::from_halfspaces(2, std::vector<Halfspace>{{{1, 0}, 0}, {{0, 1}, 0}, {{-1, 0}, -2},
                                                                {{0, -1}, -1}, {{-1, -1}, t - 3}});
}

HPolytope two_simplex() {
    return HPolytope::from_halfspaces(2, std::vector<Halfspace>{{{1, 0}, 0}, {{0, 1}, 0}, {{-1, -1}, -2}});
}

// Shoelace formula for a convex polygon given its vertices.
Rational shoelace(std::vector<RVector> v) {
    Rational cx = 0, cy = 0;
    for (const auto& p : v) {
        cx += p[0];
        cy += p[1];
    }
    cx /= v.size();
    cy /= v.size();
    std::sort(v.begin(), v.end(), [&](const RVector& a, const RVector& b) {
        return std::atan2(to_double(a[1] - cy), to_double(a[0] - cx)) <
               std::atan2(to_double(b[1] - cy), to_double(b[0] - cx));
    });
    Rational s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        s += a[0] * b[1] - a[1] * b[0];
    }
    return s / 2;
}

}  // namespace

TEST_CASE("unit square basics") {
    const auto sq = HPolytope::box({0, 0}, {1, 1});
    CHECK(sq.facet_count() == 4);
    REQUIRE(sq.vertices().size() == 4);
    CHECK(sq.vertices()[0] == RVector{0, 0});
    CHECK(sq.vertices()[3] == RVector{1, 1});
    CHECK(volume(sq) == 1);
    const auto m = moments(sq);
    CHECK(m.barycenter == RVector{q(1, 2), q(1, 2)});
    CHECK(m.variance == q(1, 6));
    CHECK(m.covariance[0][1] == 0);
    CHECK(diameter(sq) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("two-simplex normals, barycenter and volume") {
    const auto p = two_simplex();
    CHECK(p.vertices().size() == 3);
    CHECK(volume(p) == 2);
    CHECK(moments(p).barycenter == RVector{q(2, 3), q(2, 3)});
    // Marginal of x has density (2-x)/2 on [0,2]: E[x^2] = 2/3, so Var(x) = 2/3 - 4/9.
    CHECK(moments(p).variance == 2 * (q(2, 3) - q(4, 9)));
}

TEST_CASE("redundant and rational constraints are normalized") {
    std::vector<RationalHalfspace> hs{{{q(1, 2), 0}, 0},
                                      {{0, 3}, 0},
                                      {{-1, -1}, -2},
                                      {{-2, -2}, -4},
                                      {{-1, 0}, -5}};
    const auto p = HPolytope::from_halfspaces(2, hs);
    CHECK(p.facet_count() == 3);
    CHECK(p.same_set(two_simplex()));
    CHECK(p.facets()[0].normal == IVector{1, 0});
    CHECK(p.facets()[1].normal == IVector{0, 1});
}

TEST_CASE("pentagon family") {
    for (int k = 1; k <= 4; ++k) {
        const Rational t = q(1, 1L << k);
        const auto p = pentagon(t);
        CHECK(p.vertices().size() == 5);
        CHECK(volume(p) == 2 - t * t / 2);
        CHECK(volume(p) == shoelace(p.vertices()));
    }
    const auto half = pentagon(q(1, 2));
    bool has = false, has2 = false;
    for (const auto& v : half.vertices()) {
        has = has || v == RVector{q(3, 2), 1};
        has2 = has2 || v == RVector{2, q(1, 2)};
    }
    CHECK(has);
    CHECK(has2);
}

TEST_CASE("error kinds") {
    auto kind_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidInput;
    };
    CHECK(kind_of([] { HPolytope::from_halfspaces(2, std::vector<Halfspace>{{{1, 0}, 0}, {{0, 1}, 0}}); }) ==
          ErrorKind::Unbounded);
    CHECK(kind_of([] {
              HPolytope::from_halfspaces(
                  2, std::vector<Halfspace>{{{1, 0}, 0}, {{0, 1}, 0}, {{1, -1}, 0}, {{0, -1}, -1}});
          }) == ErrorKind::Unbounded);
    CHECK(kind_of([] {
              HPolytope::from_halfspaces(2, std::vector<Halfspace>{{{1, 0}, 1}, {{-1, 0}, 0}, {{0, 1}, 0}, {{0, -1}, -1}});
          }) == ErrorKind::Empty);
    CHECK(kind_of([] {
              HPolytope::from_halfspaces(2, std::vector<Halfspace>{{{1, 0}, 0}, {{-1, 0}, 0}, {{0, 1}, 0}, {{0, -1}, -1}});
          }) == ErrorKind::Degenerate);
    CHECK(kind_of([] { HPolytope::from_halfspaces(2, std::vector<Halfspace>{{{0, 0}, 0}, {{1, 0}, 0}, {{0, 1}, 0}}); }) ==
          ErrorKind::InvalidInput);
    CHECK(kind_of([] { faces(HPolytope::box({0, 0}, {1, 1}), 2); }) == ErrorKind::BadK);
    CHECK(kind_of([] { intersect(HPolytope::box({0, 0}, {1, 1}), HPolytope::box({1, 0}, {2, 1})); }) ==
          ErrorKind::Empty);
}

TEST_CASE("vertex and half-space representations round trip") {
    const auto p = pentagon(q(1, 4));
    const auto v = vertex_enumeration(p);
    CHECK(v.vertices() == p.vertices());
    CHECK(halfspace_reconstruction(v).same_set(p));
    std::vector<RVector> cloud = p.vertices();
    cloud.push_back({1, q(1, 2)});
    cloud.push_back({0, q(1, 2)});
    CHECK(VPolytope::from_points(2, cloud).vertices() == p.vertices());
}

TEST_CASE("face lattice of the cube") {
    const auto cube = HPolytope::box({0, 0, 0}, {1, 1, 1});
    const FaceLattice lat(cube);
    CHECK(lat.faces(0).size() == 8);
    CHECK(lat.faces(1).size() == 12);
    CHECK(lat.faces(2).size() == 6);
    CHECK(lat.triangulate().size() == 6);
    CHECK(volume(cube) == 1);
    const auto m = moments(cube);
    CHECK(m.variance == q(1, 4));
}

TEST_CASE("volume agrees with Monte Carlo in 3D") {
    // Truncated simplex: x,y,z >= 0, x+y+z <= 2, x <= 1.
    const auto p = HPolytope::from_halfspaces(
        3, std::vector<Halfspace>{{{1, 0, 0}, 0}, {{0, 1, 0}, 0}, {{0, 0, 1}, 0}, {{-1, -1, -1}, -2}, {{-1, 0, 0}, -1}});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const int n = 200000;
    int hit = 0;
    for (int i = 0; i < n; ++i) {
        const double x = u(rng), y = u(rng), z = u(rng);
        if (x + y + z <= 2 && x <= 1) ++hit;
    }
    const double mc = 8.0 * hit / n;
    CHECK(to_double(volume(p)) == doctest::Approx(mc).epsilon(0.02));
    CHECK(volume(p) == q(8, 6) - q(1, 6));
}

TEST_CASE("point distance") {
    const auto sq = HPolytope::box({0, 0}, {1, 1});
    const double inside[] = {0.5, 0.5};
    const double right[] = {3.0, 0.5};
    const double corner[] = {2.0, 2.0};
    CHECK(point_distance(inside, sq) == 0.0);
    CHECK(point_distance(right, sq) == doctest::Approx(2.0));
    CHECK(point_distance(corner, sq) == doctest::Approx(std::sqrt(2.0)));
    const auto tri = two_simplex();
    const double far[] = {2.0, 2.0};
    CHECK(point_distance(far, tri) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("translate and scale") {
    const auto sq = HPolytope::box({0, 0}, {1, 1});
    CHECK(translate(sq, {1, 2}).same_set(HPolytope::box({1, 2}, {2, 3})));
    CHECK(scale(sq, 3).same_set(HPolytope::box({0, 0}, {3, 3})));
    CHECK(volume(scale(two_simplex(), q(1, 2))) == q(1, 2));
}

TEST_CASE("one-dimensional segment") {
    const auto seg = HPolytope::box({0}, {2});
    CHECK(seg.vertices().size() == 2);
    CHECK(volume(seg) == 2);
    CHECK(moments(seg).variance == q(1, 3));
    CHECK(FaceLattice(seg).faces(0).size() == 2);
}
