#include "doctest.h"
#include "toricgh/distances.hpp"
#include "toricgh/error.hpp"
#include "toricgh/gh.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

using namespace toricgh;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

HPolytope rect(const Rational& a, const Rational& b) { return HPolytope::box({0, 0}, {a, b}); }

HPolytope pentagon(const Rational& t) {
    return HPolytope::from_halfspaces(2, std::vector<Halfspace>{{{1, 0}, 0}, {{0, 1}, 0}, {{-1, 0}, -2},
                                                                {{0, -1}, -1}, {{-1, -1}, t - 3}});
}

SampleConfig config(const Rational& h, int m) {
    SampleConfig c;
    c.h = h;
    c.delta = h;
    c.torus_res = m;
    return c;
}

ToricManifoldSample sample(const HPolytope& p, const SampleConfig& cfg) {
    return ToricManifoldSample::build(GuilleminChart(DelzantPolytope::from(p)), cfg);
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("face matching: identical polytopes") {
    const auto p = pentagon(q(1, 2));
    for (std::size_t k = 0; k < 2; ++k) {
        const FaceMatch m = face_convergence_report(p, p, k, 1e-9);
        CHECK(m.matched.size() == 5);
        CHECK(m.unmatched_source.empty());
        CHECK(m.unmatched_target.empty());
        for (const auto& pr : m.matched) {
            CHECK(pr.gap == doctest::Approx(0.0));
            CHECK(pr.essential);
        }
        CHECK(m.count_inequality);
    }
    const FaceMatch cube = face_convergence_report(HPolytope::box({0, 0, 0}, {1, 1, 1}), HPolytope::box({0, 0, 0}, {1, 1, 1}), 1, 1e-9);
    CHECK(cube.matched.size() == 12);
    for (const auto& pr : cube.matched) CHECK(pr.measure == doctest::Approx(1.0));
}

TEST_CASE("face matching: pentagon against the rectangle") {
    const Rational t = q(1, 1024);
    const double td = to_double(t);
    const auto p = pentagon(t);
    const auto r = rect(2, 1);

    const FaceMatch edges = face_convergence_report(p, r, 1, 0.01);
    REQUIRE(edges.matched.size() == 4);
    REQUIRE(edges.unmatched_source.size() == 1);
    CHECK(edges.unmatched_target.empty());
    // Exact geometry: left and bottom edges coincide, right and top edges are shortened by t.
    CHECK(edges.matched[0].gap == doctest::Approx(0.0));
    CHECK(edges.matched[1].gap == doctest::Approx(0.0));
    CHECK(edges.matched[2].gap == doctest::Approx(td));
    CHECK(edges.matched[3].gap == doctest::Approx(td));
    for (std::size_t i = 1; i < edges.matched.size(); ++i) CHECK(edges.matched[i - 1].gap <= edges.matched[i].gap);
    CHECK(edges.within_tolerance);
    CHECK(edges.count_inequality);
    const FaceLattice lattice(p);
    const auto& cut = lattice.faces(1)[edges.unmatched_source[0]];
    REQUIRE(cut.facets.size() == 1);
    CHECK(p.facets()[cut.facets[0]].normal == IVector{-1, -1});
    REQUIRE(edges.facets.size() == 4);
    for (const auto& f : edges.facets) {
        CHECK(f.source_normal == f.target_normal);
        CHECK(abs(f.source_offset - f.target_offset) <= Rational(0));
    }

    // The cut edge has length t sqrt 2, below the essential threshold 1e-3 * sqrt 5.
    const FaceMatch with_cut = face_convergence_report(p, rect(2, 1), 1, 10.0);
    for (const auto& pr : with_cut.matched) CHECK(pr.essential == (pr.measure > 1e-3 * std::sqrt(5.0)));
    const FaceMatch vs_self = face_convergence_report(p, p, 1, 1e-9);
    bool found = false;
    for (const auto& pr : vs_self.matched)
        if (std::abs(pr.measure - td * std::sqrt(2.0)) < 1e-12) {
            found = true;
            CHECK_FALSE(pr.essential);
        }
    CHECK(found);

    const FaceMatch verts = face_convergence_report(p, r, 0, 0.01);
    CHECK(verts.matched.size() == 4);
    CHECK(verts.unmatched_source.size() == 1);
    for (const auto& pr : verts.matched) CHECK(pr.gap <= td + 1e-12);
    CHECK(verts.source_faces == 5);
    CHECK(verts.target_faces == 4);
    CHECK(verts.count_inequality);
}

TEST_CASE("face matching errors") {
    CHECK(kind_of([] { face_convergence_report(rect(1, 1), rect(1, 1), 2, 0.1); }) == ErrorKind::BadK);
    CHECK(kind_of([] { face_convergence_report(rect(1, 1), HPolytope::box({0}, {1}), 0, 0.1); }) ==
          ErrorKind::DimensionMismatch);
}

TEST_CASE("normal stability") {
    std::vector<HPolytope> squares, rects, pentagons;
    for (long i = 1; i <= 8; ++i) {
        squares.push_back(HPolytope::box({0, 0}, {1 + q(1, i), 1 + q(1, i)}));
        rects.push_back(rect(2, 1 + q(1, i)));
        pentagons.push_back(pentagon(q(1, i + 1)));
    }
    const auto s = normal_stability(squares, rect(1, 1));
    CHECK(s.stable);
    CHECK_FALSE(s.facet_count_mismatch);
    for (const auto& t : s.tracks) {
        CHECK(t.eventually_constant);
        for (const auto& v : t.normals) CHECK(v == t.normals.front());
    }

    const auto r = normal_stability(rects, rect(2, 1));
    CHECK(r.stable);
    for (const auto& t : r.tracks) {
        if (rect(2, 1).facets()[t.facet].normal != IVector{0, -1}) continue;
        for (std::size_t i = 0; i < t.offsets.size(); ++i) CHECK(t.offsets[i] == -(1 + q(1, static_cast<long>(i) + 1)));
    }

    const auto p = normal_stability(pentagons, rect(2, 1));
    CHECK(p.facet_count_mismatch);
    CHECK_FALSE(p.stable);
    CHECK(p.facet_counts.back() == 5);
    CHECK(p.limit_facets == 4);

    const auto bad = halfspace_reconstruction(VPolytope::from_points(2, {{0, 0}, {1, 0}, {0, 2}}));
    CHECK(kind_of([&] { normal_stability({bad}, rect(1, 1)); }) == ErrorKind::NotDelzant);
    CHECK(kind_of([&] { normal_stability({rect(1, 1)}, bad); }) == ErrorKind::NotDelzant);
}

TEST_CASE("distortion of identities, shifts and a wrong automorphism") {
    const auto s = sample(pentagon(q(1, 2)), config(q(1, 4), 4));
    const auto id = identity_map(s);
    DistortionOptions exhaustive;
    exhaustive.exhaustive = true;
    const auto r = eqgh_distortion(id, exhaustive);
    CHECK(r.eps_iso == 0.0);
    CHECK(r.eps_surj == 0.0);
    CHECK(r.eps_equiv == 0.0);
    CHECK(r.exhaustive);

    ApproxMap shifted = id;
    for (std::size_t a = 0; a < s.node_count(); ++a) shifted.assignment[a] = s.shift(s.shift(a, 0, 1), 1, 3);
    const auto rs = eqgh_distortion(shifted, exhaustive);
    CHECK(rs.eps_iso == 0.0);
    CHECK(rs.eps_surj == 0.0);
    CHECK(rs.eps_equiv == 0.0);

    // With rho = inversion the defect at x is d(g x, g^{-1} x), two fiber steps apart.
    ApproxMap wrong = id;
    wrong.rho = GroupAutomorphism::inversion(2);
    double step = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < s.base_count(); ++b)
        for (std::size_t g = 0; g < 2; ++g) step = std::min(step, s.distance(s.node(b, 0), s.shift(s.node(b, 0), g)));
    const auto rw = eqgh_distortion(wrong, exhaustive);
    CHECK(rw.eps_equiv >= step);
    CHECK(rw.eps_iso == 0.0);

    const auto same = build_approx_map(s, s);
    for (std::size_t a = 0; a < s.node_count(); ++a) REQUIRE(same.assignment[a] == a);
    CHECK(same.kind == MapKind::ChartAffine);
}

TEST_CASE("normal fan mismatch is reported, not bridged") {
    const auto cfg = config(q(1, 4), 2);
    const auto pent = sample(pentagon(q(1, 2)), cfg);
    const auto r = sample(rect(2, 1), cfg);
    CHECK(kind_of([&] { build_approx_map(pent, r); }) == ErrorKind::NormalFanMismatch);
    CHECK(kind_of([&] { build_approx_map(r, pent); }) == ErrorKind::NormalFanMismatch);
    const auto g = build_greedy_map(pent, r);
    CHECK(g.kind == MapKind::Greedy);
    CHECK(g.assignment.size() == pent.node_count());
}

TEST_CASE("dilation family: distortions decrease toward the grid floor") {
    const auto cfg = config(q(1, 10), 4);
    const auto limit = sample(rect(1, 1), cfg);
    std::vector<DistortionReport> reports;
    for (long k = 1; k <= 5; ++k) {
        const Rational s = 1 + q(1, 1L << k);
        const auto x = sample(HPolytope::box({0, 0}, {s, s}), cfg);
        reports.push_back(eqgh_distortion(build_approx_map(x, limit)));
        MESSAGE("k=" << k << " iso " << reports.back().eps_iso << " surj " << reports.back().eps_surj << " equiv "
                     << reports.back().eps_equiv);
    }
    for (std::size_t i = 1; i < reports.size(); ++i) {
        CHECK(reports[i].eps_iso <= 1.1 * reports[i - 1].eps_iso);
        CHECK(reports[i].eps_surj <= 1.1 * reports[i - 1].eps_surj + 1e-12);
        CHECK(reports[i].eps_equiv <= 1.1 * reports[i - 1].eps_equiv + 1e-12);
    }
    CHECK(reports.back().eps <= 2 * limit.grid_scale());
}

TEST_CASE("segment dilations: the distortion halves with the dilation") {
    // 1D samples are cheap enough to make the grid floor small against 1/i.
    SampleConfig cfg = config(q(1, 400), 16);
    const auto limit = sample(HPolytope::box({0}, {1}), cfg);
    std::vector<double> iso;
    for (long i : {4L, 8L, 16L}) {
        const auto x = sample(HPolytope::box({0}, {1 + q(1, i)}), cfg);
        const auto r = eqgh_distortion(build_approx_map(x, limit));
        iso.push_back(r.eps_iso);
        CHECK(r.eps_equiv == 0.0);
        MESSAGE("i=" << i << " iso " << r.eps_iso << " surj " << r.eps_surj);
    }
    for (std::size_t j = 1; j < iso.size(); ++j) CHECK(iso[j - 1] / iso[j] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("GH bounds") {
    const auto cfg = config(q(1, 5), 3);
    const auto s = sample(pentagon(q(1, 2)), cfg);
    const auto self = gh_bounds(s, s);
    CHECK(self.lower == 0.0);
    CHECK(self.upper <= s.grid_scale());

    // Segment manifolds are round spheres of diameter pi sqrt(lam/2).
    SampleConfig seg = config(q(1, 50), 16);
    const auto a = sample(HPolytope::box({0}, {2}), seg);
    const auto b = sample(HPolytope::box({0}, {8}), seg);
    const auto ab = gh_bounds(a, b);
    CHECK(ab.lower == doctest::Approx(std::numbers::pi / 2).epsilon(0.05));
    CHECK(ab.lower <= ab.upper);

    const std::vector<HPolytope> pool = {rect(1, 1), rect(2, 1), rect(1, q(3, 2)), pentagon(q(1, 2)), pentagon(q(3, 4)),
                                         halfspace_reconstruction(VPolytope::from_points(2, {{0, 0}, {2, 0}, {0, 2}})),
                                         halfspace_reconstruction(VPolytope::from_points(2, {{0, 0}, {3, 0}, {2, 1}, {0, 1}}))};
    std::vector<std::unique_ptr<ToricManifoldSample>> samples;
    const auto small = config(q(1, 4), 3);
    for (const auto& p : pool) samples.push_back(std::make_unique<ToricManifoldSample>(sample(p, small)));
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int i = 0; i < 20; ++i) {
        const std::size_t x = pick(rng), y = pick(rng);
        const auto g = gh_bounds(*samples[x], *samples[y]);
        CHECK(g.lower <= g.upper);
    }
}

TEST_CASE("fixed-point tracking") {
    const auto cfg = config(q(1, 5), 8);
    const auto limit = sample(rect(2, 1), cfg);

    const auto id = identity_map(limit);
    const auto same = fixed_point_tracking({&limit}, limit, {id});
    CHECK(same.steps[0].gap == 0.0);
    CHECK(same.steps[0].proxies == 4);
    CHECK(same.count_inequality);

    std::vector<std::unique_ptr<ToricManifoldSample>> rects, pents;
    std::vector<const ToricManifoldSample*> rp, pp;
    std::vector<ApproxMap> rm, pm;
    for (long i = 1; i <= 4; ++i) {
        rects.push_back(std::make_unique<ToricManifoldSample>(sample(rect(2, 1 + q(1, 2 * i)), cfg)));
        pents.push_back(std::make_unique<ToricManifoldSample>(sample(pentagon(q(1, 2 * i)), cfg)));
        rp.push_back(rects.back().get());
        pp.push_back(pents.back().get());
        rm.push_back(build_approx_map(*rects.back(), limit));
        pm.push_back(build_greedy_map(*pents.back(), limit));
    }
    const auto r = fixed_point_tracking(rp, limit, rm);
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        CHECK(r.steps[i].gap <= 1.0 / (2.0 * (i + 1)) + 2 * limit.grid_scale());
        CHECK(r.steps[i].proxies >= 4);
    }
    const auto p = fixed_point_tracking(pp, limit, pm);
    CHECK(p.count_inequality);
    for (const auto& st : p.steps) CHECK(st.proxies == 5);
    CHECK(kind_of([&] { fixed_point_tracking(rp, limit, pm); }) == ErrorKind::InvalidInput);
}

TEST_CASE("reconstruction of the limit polytope") {
    const Rational h = q(1, 10);
    const auto cfg = config(h, 2);
    const auto limit = sample(rect(2, 1), cfg);
    const auto own = reconstruct_polytope(identity_map(limit));
    CHECK(own.outside == 0.0);
    CHECK(own.gap <= limit.grid_scale());

    double prev = std::numeric_limits<double>::infinity();
    for (long i = 1; i <= 8; i *= 2) {
        const auto x = sample(rect(2, 1 + q(1, i)), cfg);
        const auto r = reconstruct_polytope(build_approx_map(x, limit));
        CHECK(r.outside <= to_double(h) * std::sqrt(2.0));
        CHECK(r.gap <= 1.0 / i + 2 * to_double(h) * std::sqrt(2.0));
        CHECK(r.gap <= prev + 1e-12);
        prev = r.gap;
    }
}

TEST_CASE("fiber averages and the Duistermaat-Heckman mass") {
    const auto cfg = config(q(1, 10), 2);
    const auto limit = sample(rect(2, 1), cfg);
    const auto one = fiber_average("one", identity_map(limit));
    CHECK(one.mass == Rational(2));
    CHECK(one.integral == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(one.gap == doctest::Approx(0.0).epsilon(1e-12));

    // Identity, phi = x1: the only error is the projection of boundary cells onto the inset.
    const auto x1 = fiber_average("x1", identity_map(limit));
    CHECK(x1.target == doctest::Approx(2.0));
    CHECK(x1.gap <= 0.05);
    CHECK(x1.section_gap == 0.0);

    double prev = std::numeric_limits<double>::infinity();
    for (long i = 1; i <= 8; i *= 2) {
        const auto p = rect(2, 1 + q(1, i));
        const auto x = sample(p, cfg);
        const auto f = build_approx_map(x, limit);
        const auto mass = fiber_average("one", f);
        CHECK(mass.mass == volume(p));
        CHECK(mass.gap == doctest::Approx(to_double(volume(p)) - 2.0));
        const auto sq = fiber_average("x1x1", f);
        CHECK(sq.target == doctest::Approx(8.0 / 3.0));
        CHECK(sq.gap <= prev + 1e-12);
        prev = sq.gap;
    }
    CHECK(kind_of([&] { fiber_average("cubic", identity_map(limit)); }) == ErrorKind::UnknownTestFunction);
}
