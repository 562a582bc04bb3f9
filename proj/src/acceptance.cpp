#include "toricgh/acceptance.hpp"

#include "toricgh/delzant.hpp"
#include "toricgh/distances.hpp"
#include "toricgh/error.hpp"
#include "toricgh/gh.hpp"
#include "toricgh/guillemin.hpp"
#include "toricgh/manifold_sample.hpp"
#include "toricgh/polytope_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

namespace toricgh {

namespace {

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (!passed) detail << "; ";
            else detail.str("");
            passed = false;
            detail << what;
        }
    }
};

HPolytope polygon(const std::vector<RVector>& pts) { return halfspace_reconstruction(VPolytope::from_points(2, pts)); }

HPolytope random_lattice_polygon(std::mt19937_64& rng, int range) {
    std::uniform_int_distribution<int> c(0, range);
    for (;;) {
        std::vector<RVector> pts;
        for (int i = 0; i < 6; ++i) pts.push_back({c(rng), c(rng)});
        try {
            return polygon(pts);
        } catch (const Error&) {
        }
    }
}

HPolytope random_delzant_polygon(std::mt19937_64& rng, std::size_t which) {
    const std::vector<HPolytope> seeds = {HPolytope::box({0, 0}, {1, 1}), polygon({{0, 0}, {2, 0}, {0, 2}}),
                                          pentagon_polytope(Rational(1, 2)), polygon({{0, 0}, {3, 0}, {2, 1}, {0, 1}}),
                                          polygon({{0, 0}, {4, 0}, {2, 1}, {0, 1}})};
    std::uniform_int_distribution<int> e(-1, 1);
    std::uniform_int_distribution<int> t(-3, 3);
    for (;;) {
        IMatrix a{{e(rng), e(rng)}, {e(rng), e(rng)}};
        const Integer det = determinant(a);
        if (det == 1 || det == -1)
            return apply_map(seeds[which % seeds.size()], UnimodularAffineMap(a, {Rational(t(rng), 2), Rational(t(rng), 3)}));
    }
}

Eigen::VectorXd interior_point(std::mt19937_64& rng, const HPolytope& p, double min_dist) {
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
            Eigen::VectorXd nu(static_cast<Eigen::Index>(p.dim()));
            for (std::size_t k = 0; k < p.dim(); ++k) nu(static_cast<Eigen::Index>(k)) = f.normal[k].convert_to<double>();
            ok = ok && nu.dot(x) - to_double(f.offset) >= min_dist * nu.norm();
        }
        if (ok) return x;
    }
}

SampleConfig sample_config(const Rational& h, const Rational& delta, int m) {
    SampleConfig c;
    c.h = h;
    c.delta = delta;
    c.torus_res = m;
    return c;
}

std::unique_ptr<ToricManifoldSample> make_sample(const HPolytope& p, const SampleConfig& cfg) {
    return std::make_unique<ToricManifoldSample>(ToricManifoldSample::build(GuilleminChart(DelzantPolytope::from(p)), cfg));
}

// 1. Pentagons P_t, t = 2^-k, against the rectangle.
Outcome topology_equivalence(std::uint64_t) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    const HPolytope rect = HPolytope::box({0, 0}, {2, 1});
    double prev = std::numeric_limits<double>::infinity(), first = 0, last = 0;
    for (int k = 1; k <= 8; ++k) {
        const Rational t(1, 1L << k);
        const HPolytope p = pentagon_polytope(t);
        const double dh = d_hausdorff(p, rect);
        o.require(std::abs(dh - to_double(t) / std::sqrt(2.0)) <= 1e-9, "dH(k=" + std::to_string(k) + ") = " + std::to_string(dh));
        o.require(d_volume(p, rect) == t * t / 2, "dV(k=" + std::to_string(k) + ") = " + to_string(d_volume(p, rect)));
        const auto w = d_wasserstein(p, rect);
        o.require(w.value < prev, "dW not decreasing at k=" + std::to_string(k));
        o.require(w.value - w.error_bound <= wasserstein_upper_bound(p, rect),
                  "dW above the coupling bound at k=" + std::to_string(k));
        prev = w.value;
        if (k == 1) first = w.value;
        last = w.value;
    }
    o.require(last < 1e-3, "dW(k=8) = " + std::to_string(last));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs <= 120, "runtime " + std::to_string(secs) + " s");
    if (o.passed)
        o.detail << "dH = t/sqrt2, dV = t^2/2 for k=1..8; dW " << first << " -> " << last << " decreasing, under the bound";
    return o;
}

// 2. Wasserstein values with closed forms.
Outcome wasserstein_oracles(std::uint64_t seed) {
    Outcome o;
    WassersteinConfig fine;
    fine.h = Rational(1, 200);
    const double w1 = d_wasserstein(HPolytope::box({0}, {1}), HPolytope::box({0}, {2}), fine).value;
    const double exact = 1 / std::sqrt(3.0);
    o.require(std::abs(w1 - exact) <= 0.02 * exact, "dW(U[0,1],U[0,2]) = " + std::to_string(w1));
    std::mt19937_64 rng(seed + 2);
    WassersteinConfig cfg;
    const double tol = 2 * to_double(cfg.h) * std::sqrt(2.0);
    double worst = 0;
    for (int i = 0; i < 3; ++i) {
        const HPolytope p = random_lattice_polygon(rng, 2);
        const double w = d_wasserstein(p, translate(p, {Rational(1, 2), Rational(1, 2)}), cfg).value;
        worst = std::max(worst, std::abs(w - std::sqrt(0.5)));
    }
    o.require(worst <= tol, "translation error " + std::to_string(worst));
    if (o.passed) o.detail << "1D value " << w1 << " (exact " << exact << "); translation error " << worst << " <= " << tol;
    return o;
}

// 3. Delzant verdicts on the catalog.
Outcome delzant_catalog(std::uint64_t) {
    Outcome o;
    for (const char* name : {"square", "simplex2", "2simplex2", "pentagon:1/2"})
        o.require(is_delzant(catalog_polytope(name)).pass, std::string(name) + " rejected");
    const auto bad = is_delzant(catalog_polytope("triangle_bad"));
    o.require(!bad.pass, "triangle (0,0),(1,0),(0,2) accepted");
    const bool minus_two = std::any_of(bad.vertices.begin(), bad.vertices.end(), [](const VertexCertificate& c) { return c.det == -2; });
    o.require(minus_two, "no vertex determinant -2 on the bad triangle");
    if (o.passed) o.detail << "square, simplex2, 2simplex2, pentagon:1/2 pass; bad triangle fails with determinant -2";
    return o;
}

// 4. Guillemin Hessian and the segment geodesic.
Outcome guillemin_metric(std::uint64_t seed) {
    Outcome o;
    std::mt19937_64 rng(seed + 4);
    double worst = 0;
    for (std::size_t k = 0; k < 5; ++k) {
        const HPolytope p = random_delzant_polygon(rng, k);
        const GuilleminChart c{DelzantPolytope::from(p)};
        for (int i = 0; i < 100; ++i) {
            const Eigen::VectorXd x = interior_point(rng, p, 0.1);
            const Eigen::MatrixXd g = c.hessian(x).g;
            const double s = 1e-4;
            Eigen::MatrixXd fd(2, 2);
            for (Eigen::Index a = 0; a < 2; ++a)
                for (Eigen::Index b = 0; b < 2; ++b) {
                    const Eigen::VectorXd ea = Eigen::VectorXd::Unit(2, a) * s, eb = Eigen::VectorXd::Unit(2, b) * s;
                    fd(a, b) = (c.potential(x + ea + eb) - c.potential(x + ea - eb) - c.potential(x - ea + eb) +
                                c.potential(x - ea - eb)) /
                               (4 * s * s);
                }
            worst = std::max(worst, (fd - g).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff());
        }
    }
    o.require(worst <= 1e-6, "Hessian relative error " + std::to_string(worst));

    const GuilleminChart seg{DelzantPolytope::from(HPolytope::box({0}, {2}))};
    const std::vector<std::tuple<long, int>> ladder = {{10, 8}, {20, 16}, {50, 32}};
    std::vector<double> err;
    std::ostringstream values;
    for (const auto& [inv_h, m] : ladder) {
        const auto s = ToricManifoldSample::build(seg, sample_config(Rational(1, inv_h), Rational(1, inv_h), m));
        const double d = s.distance(s.vertex_node(0), s.vertex_node(1));
        err.push_back(std::abs(d - std::numbers::pi) / std::numbers::pi);
        values << (values.tellp() ? ", " : "") << d;
    }
    o.require(err.back() <= 0.05, "geodesic error " + std::to_string(err.back()));
    o.require(std::is_sorted(err.rbegin(), err.rend()), "geodesic error not improving: " + values.str());
    if (o.passed) o.detail << "Hessian rel. error " << worst << "; vertex-to-vertex " << values.str() << " -> pi";
    return o;
}

// 5. Duistermaat-Heckman masses.
Outcome duistermaat_heckman(std::uint64_t) {
    Outcome o;
    const auto cfg = sample_config(Rational(1, 10), Rational(1, 10), 2);
    for (const char* name : {"square", "simplex2", "2simplex2", "pentagon:1/2", "rect:2,1"}) {
        const HPolytope p = catalog_polytope(name);
        o.require(make_sample(p, cfg)->total_measure() == volume(p), std::string("sample mass differs on ") + name);
    }
    const auto limit = make_sample(HPolytope::box({0, 0}, {1, 1}), cfg);
    for (long k = 1; k <= 5; ++k) {
        const Rational s = 1 + Rational(1, 1L << k);
        const HPolytope p = HPolytope::box({0, 0}, {s, s});
        const auto x = make_sample(p, cfg);
        const auto avg = fiber_average("one", build_approx_map(*x, *limit));
        o.require(avg.mass == volume(p), "fiber average mass differs at k=" + std::to_string(k));
    }
    if (o.passed) o.detail << "sample mass = |P| exactly on 5 catalog polytopes; phi = 1 reproduces |P_i| on the dilation family";
    return o;
}

// 6. Orbit volume toward the facets of the square.
Outcome orbit_collapse(std::uint64_t) {
    Outcome o;
    const GuilleminChart c{DelzantPolytope::from(HPolytope::box({0, 0}, {1, 1}))};
    Eigen::VectorXd centre(2);
    centre << 0.5, 0.5;
    const double v0 = c.orbit_volume(centre);
    double worst_ratio = 0;
    for (int facet = 0; facet < 4; ++facet) {
        Eigen::VectorXd foot(2), inward(2);
        const int axis = facet % 2;
        const bool low = facet < 2;
        foot << 0.5, 0.5;
        foot(axis) = low ? 0 : 1;
        inward.setZero();
        inward(axis) = low ? 1 : -1;
        std::vector<double> v;
        for (int k = 1; k <= 40; ++k) v.push_back(c.orbit_volume(foot + 0.5 * std::pow(10.0, -4.0 * k / 40) * inward));
        for (std::size_t i = v.size() - 10; i < v.size(); ++i)
            o.require(v[i] < v[i - 1], "not strictly decreasing toward facet " + std::to_string(facet));
        worst_ratio = std::max(worst_ratio, c.orbit_volume(foot + 1e-4 * inward) / v0);
    }
    o.require(worst_ratio < 1e-2, "orbit volume at distance 1e-4 is " + std::to_string(worst_ratio) +
                                      " of the centre value (needs < 1e-2)");
    if (o.passed) o.detail << "strictly decreasing; ratio at 1e-4 = " << worst_ratio;
    return o;
}

// 7. Equivariant GH convergence of the dilation family.
Outcome equivariant_gh(std::uint64_t seed) {
    Outcome o;
    const auto cfg = sample_config(Rational(1, 10), Rational(1, 10), 8);
    const auto limit = make_sample(HPolytope::box({0, 0}, {1, 1}), cfg);
    const double floor = limit->grid_scale();
    DistortionOptions dopt;
    dopt.seed = seed;
    std::vector<DistortionReport> eps;
    std::vector<double> upper;
    for (long k = 1; k <= 5; ++k) {
        const Rational s = 1 + Rational(1, 1L << k);
        const auto x = make_sample(HPolytope::box({0, 0}, {s, s}), cfg);
        eps.push_back(eqgh_distortion(build_approx_map(*x, *limit), dopt));
        upper.push_back(gh_bounds(*x, *limit, dopt).upper);
    }
    auto component = [&](const char* name, double DistortionReport::*field) {
        for (std::size_t i = 1; i < eps.size(); ++i)
            o.require(eps[i].*field <= 1.1 * (eps[i - 1].*field) + 1e-12, std::string(name) + " increases at k=" + std::to_string(i + 1));
        o.require(eps.back().*field <= 2 * floor, std::string(name) + " ends above twice the grid floor");
        o.require(eps.back().*field <= eps.front().*field, std::string(name) + " does not decrease");
    };
    component("eps_iso", &DistortionReport::eps_iso);
    component("eps_surj", &DistortionReport::eps_surj);
    component("eps_equiv", &DistortionReport::eps_equiv);
    double c = 0;
    for (std::size_t i = 0; i < 2; ++i) c = std::max(c, (upper[i] - 2 * floor) * std::pow(2.0, static_cast<double>(i + 1)));
    for (std::size_t i = 2; i < upper.size(); ++i)
        o.require(upper[i] <= c * std::pow(2.0, -static_cast<double>(i + 1)) + 2 * floor + 1e-12,
                  "gh_upper above the fitted bound at k=" + std::to_string(i + 1));
    if (o.passed) {
        o.detail << "eps_iso";
        for (const auto& e : eps) o.detail << " " << e.eps_iso;
        o.detail << ", eps_surj " << eps.back().eps_surj << ", eps_equiv " << eps.back().eps_equiv << " (floor " << floor
                 << "); gh_upper";
        for (double u : upper) o.detail << " " << u;
        o.detail << " with C = " << c;
    }
    return o;
}

// 8. Fixed points and the Euler characteristic.
Outcome fixed_points_euler(std::uint64_t) {
    Outcome o;
    o.require(fixed_points(DelzantPolytope::from(catalog_polytope("square"))).euler_characteristic == 4, "chi(square) != 4");
    o.require(fixed_points(DelzantPolytope::from(catalog_polytope("simplex2"))).euler_characteristic == 3, "chi(simplex) != 3");
    o.require(fixed_points(DelzantPolytope::from(catalog_polytope("pentagon:1/2"))).euler_characteristic == 5, "chi(pentagon) != 5");

    const auto cfg = sample_config(Rational(1, 10), Rational(1, 10), 8);
    const auto rect = make_sample(HPolytope::box({0, 0}, {2, 1}), cfg);
    std::ostringstream counts;
    for (long k = 1; k <= 4; ++k) {
        const auto p = make_sample(pentagon_polytope(Rational(1, 1L << k)), cfg);
        const auto r = fixed_point_tracking({p.get()}, *rect, {build_greedy_map(*p, *rect)});
        counts << (k > 1 ? "," : "") << r.steps[0].proxies;
        o.require(r.steps[0].proxies == 5 && r.count_inequality, "pentagon proxies at k=" + std::to_string(k) + ": " +
                                                                    std::to_string(r.steps[0].proxies));
    }
    double gap = 0;
    for (long i = 1; i <= 4; ++i) {
        const auto x = make_sample(HPolytope::box({0, 0}, {2, 1 + Rational(1, i)}), cfg);
        const auto r = fixed_point_tracking({x.get()}, *rect, {build_approx_map(*x, *rect)});
        gap = r.steps[0].gap;
        o.require(r.count_inequality, "rectangle family loses fixed points at i=" + std::to_string(i));
    }
    o.require(gap <= 2 * rect->grid_scale(), "rectangle proxy gap " + std::to_string(gap));
    if (o.passed)
        o.detail << "chi = 4, 3, 5; pentagon proxies " << counts.str() << " >= 4; rectangle proxy gap " << gap
                 << " <= " << 2 * rect->grid_scale();
    return o;
}

// 9. Reconstruction along shrinking rectangles.
Outcome reconstruction(std::uint64_t) {
    Outcome o;
    const Rational h(1, 10);
    const double hd = to_double(h);
    const auto cfg = sample_config(h, h, 4);
    const auto limit = make_sample(HPolytope::box({0, 0}, {2, 1}), cfg);
    double prev = std::numeric_limits<double>::infinity();
    std::ostringstream gaps;
    for (long i = 1; i <= 8; ++i) {
        const auto x = make_sample(HPolytope::box({0, 0}, {2, 1 + Rational(1, i)}), cfg);
        const auto r = reconstruct_polytope(build_approx_map(*x, *limit));
        gaps << (i > 1 ? " " : "") << r.gap;
        o.require(r.gap <= prev + 1e-12, "gap increases at i=" + std::to_string(i));
        o.require(r.gap <= 1.0 / i + 2 * hd * std::sqrt(2.0), "gap too large at i=" + std::to_string(i));
        o.require(r.outside <= hd * std::sqrt(2.0), "cloud leaves P at i=" + std::to_string(i));
        prev = r.gap;
    }
    if (o.passed) o.detail << "dH gaps " << gaps.str() << "; cloud inside P";
    return o;
}

// 10. Pentagon -> rectangle has no chart identification.
Outcome fan_obstruction(std::uint64_t) {
    Outcome o;
    const auto cfg = sample_config(Rational(1, 4), Rational(1, 4), 2);
    const auto pent = make_sample(pentagon_polytope(Rational(1, 2)), cfg);
    const auto rect = make_sample(HPolytope::box({0, 0}, {2, 1}), cfg);
    bool raised = false;
    try {
        build_approx_map(*pent, *rect);
    } catch (const Error& e) {
        raised = e.kind() == ErrorKind::NormalFanMismatch;
        if (raised) o.detail << e.what();
    }
    o.require(raised, "build_approx_map did not raise NormalFanMismatch");
    return o;
}

// 11. Metric axioms for dH, dV, dW on six random polygons.
Outcome metric_axioms(std::uint64_t seed) {
    Outcome o;
    std::mt19937_64 rng(seed + 11);
    std::vector<HPolytope> ps;
    for (int i = 0; i < 6; ++i) ps.push_back(random_lattice_polygon(rng, 3));
    WassersteinConfig cfg;
    cfg.h = Rational(1, 10);
    const std::size_t n = ps.size();
    std::vector<std::vector<WassersteinResult>> w(n, std::vector<WassersteinResult>(n));
    std::vector<std::vector<double>> dh(n, std::vector<double>(n));
    std::vector<std::vector<Rational>> dv(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            w[i][j] = d_wasserstein(ps[i], ps[j], cfg);
            dh[i][j] = d_hausdorff(ps[i], ps[j]);
            dv[i][j] = d_volume(ps[i], ps[j]);
        }
    std::size_t checks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        o.require(dh[i][i] <= 1e-9 && dv[i][i] == 0 && w[i][i].value <= 1e-9, "identity fails");
        for (std::size_t j = 0; j < n; ++j) {
            o.require(std::abs(dh[i][j] - dh[j][i]) <= 1e-9, "dH not symmetric");
            o.require(dv[i][j] == dv[j][i], "dV not symmetric");
            o.require(std::abs(w[i][j].value - w[j][i].value) <= w[i][j].error_bound + w[j][i].error_bound, "dW not symmetric");
            if (i != j) o.require(dh[i][j] > 1e-9 || ps[i].same_set(ps[j]), "dH vanishes on distinct polytopes");
            for (std::size_t k = 0; k < n; ++k) {
                ++checks;
                o.require(dh[i][k] <= dh[i][j] + dh[j][k] + 1e-9, "dH triangle inequality");
                o.require(dv[i][k] <= dv[i][j] + dv[j][k], "dV triangle inequality");
                o.require(w[i][k].value - w[i][k].error_bound <=
                              w[i][j].value + w[i][j].error_bound + w[j][k].value + w[j][k].error_bound,
                          "dW triangle inequality");
            }
        }
    }
    if (o.passed) o.detail << checks << " triples on 6 random polygons";
    return o;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    using Check = Outcome (*)(std::uint64_t);
    const std::vector<std::tuple<int, const char*, Check>> suite = {
        {1, "topology equivalence on the pentagon family", topology_equivalence},
        {2, "Wasserstein oracle values", wasserstein_oracles},
        {3, "Delzant verification of the catalog", delzant_catalog},
        {4, "Guillemin Hessian and segment geodesic", guillemin_metric},
        {5, "Duistermaat-Heckman masses", duistermaat_heckman},
        {6, "orbit collapse toward the facets", orbit_collapse},
        {7, "equivariant GH convergence of dilations", equivariant_gh},
        {8, "fixed points and Euler characteristic", fixed_points_euler},
        {9, "reconstruction along shrinking rectangles", reconstruction},
        {10, "normal fan obstruction for pentagons", fan_obstruction},
        {11, "metric axioms for dH, dV, dW", metric_axioms},
    };
    std::vector<CriterionResult> out;
    for (const auto& [id, title, check] : suite) {
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
        CriterionResult r;
        r.id = id;
        r.title = title;
        const auto start = std::chrono::steady_clock::now();
        try {
            Outcome o = check(opt.seed);
            r.passed = o.passed;
            r.detail = o.detail.str();
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("error: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream s;
    s << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << " " << r.title << ": " << r.detail;
    return s.str();
}

}  // namespace toricgh
