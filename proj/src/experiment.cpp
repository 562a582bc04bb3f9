#include "toricgh/experiment.hpp"

#include "toricgh/error.hpp"
#include "toricgh/polytope_io.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace toricgh {

namespace {

std::string num(double x) {
    std::ostringstream s;
    s << std::setprecision(12) << x;
    return s.str();
}

}  // namespace

Family make_family(const std::string& name, std::size_t steps) {
    if (steps == 0) fail(ErrorKind::BadConfig, "a family needs at least one step");
    if (steps > 30) fail(ErrorKind::BadConfig, "at most 30 steps are supported");
    Family f;
    f.name = name;
    if (name == "pentagon") {
        f.limit = HPolytope::box({0, 0}, {2, 1});
        for (std::size_t i = 1; i <= steps; ++i) {
            const Rational t(1, 1L << i);
            f.parameter.push_back(t);
            f.members.push_back(pentagon_polytope(t));
        }
    } else if (name == "dilation") {
        f.limit = HPolytope::box({0, 0}, {1, 1});
        for (std::size_t i = 1; i <= steps; ++i) {
            const Rational s = 1 + Rational(1, 1L << i);
            f.parameter.push_back(s);
            f.members.push_back(HPolytope::box({0, 0}, {s, s}));
        }
    } else if (name == "rectangle") {
        f.limit = HPolytope::box({0, 0}, {2, 1});
        for (std::size_t i = 1; i <= steps; ++i) {
            const Rational b = 1 + Rational(1, static_cast<long>(i));
            f.parameter.push_back(b);
            f.members.push_back(HPolytope::box({0, 0}, {2, b}));
        }
    } else {
        fail(ErrorKind::BadConfig, "unknown family '" + name + "' (pentagon, dilation, rectangle)");
    }
    return f;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (!(cfg.ball_radius > 0)) fail(ErrorKind::BadConfig, "bounding ball radius must be positive");
    const Family fam = make_family(cfg.family, cfg.steps);
    for (const auto& p : fam.members)
        for (const auto& v : p.vertices())
            if (to_eigen(v).norm() > cfg.ball_radius) fail(ErrorKind::BadConfig, "family leaves the declared ball");

    SampleConfig sc;
    sc.h = cfg.h;
    sc.delta = cfg.delta;
    sc.torus_res = cfg.torus_res;
    sc.seed = cfg.seed;
    DistortionOptions dopt;
    dopt.max_pairs = cfg.max_pairs;
    dopt.exhaustive = cfg.exhaustive;
    dopt.seed = cfg.seed;

    const auto limit = ToricManifoldSample::build(GuilleminChart(DelzantPolytope::from(fam.limit)), sc);
    ExperimentReport report;
    report.config = cfg;
    report.functions = test_function_names(fam.limit.dim());
    report.grid_scale = limit.grid_scale();
    report.limit_vertices = limit.vertex_count();

    for (std::size_t i = 0; i < fam.members.size(); ++i) {
        const HPolytope& p = fam.members[i];
        ExperimentRow row;
        row.i = i + 1;
        row.parameter = fam.parameter[i];
        row.d_h = d_hausdorff(p, fam.limit);
        row.d_v = d_volume(p, fam.limit);
        const auto w = d_wasserstein(p, fam.limit, cfg.wasserstein);
        row.d_w = w.value;
        row.d_w_error = w.error_bound;
        row.facet_count = p.facet_count();

        const auto s = ToricManifoldSample::build(GuilleminChart(DelzantPolytope::from(p)), sc);
        ApproxMap f;
        try {
            f = build_approx_map(s, limit);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NormalFanMismatch) throw;
            f = build_greedy_map(s, limit);
        }
        row.map = f.kind;
        row.distortion = eqgh_distortion(f, dopt);
        row.gh = gh_bounds(s, limit, dopt);
        const auto fp = fixed_point_tracking({&s}, limit, {f});
        row.fp_count = fp.steps[0].proxies;
        row.fp_gap = fp.steps[0].gap;
        const auto rec = reconstruct_polytope(f);
        row.reconstruct_gap = rec.gap;
        row.reconstruct_outside = rec.outside;
        row.mass = s.total_measure();
        for (const auto& phi : report.functions) row.fiber_gap.push_back(fiber_average(phi, f).gap);
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_csv(std::ostream& out, const ExperimentReport& report) {
    const auto& c = report.config;
    out << "# schema: experiment-csv v1\n";
    out << "# family: " << c.family << ", steps " << c.steps << ", grid " << to_string(c.h) << ", delta "
        << to_string(c.delta) << ", torus-res " << c.torus_res << ", seed " << c.seed << ", grid_scale "
        << num(report.grid_scale) << "\n";
    out << "# phi:";
    for (std::size_t k = 0; k < report.functions.size(); ++k) out << (k ? "," : " ") << "phi" << k + 1 << "=" << report.functions[k];
    out << "\n";
    out << "i,parameter,dH,dV,dW,dW_err,facet_count,map,eps_iso,eps_surj,eps_equiv,gh_lower,gh_upper,fp_count,fp_gap,"
           "reconstruct_gap";
    for (std::size_t k = 0; k < report.functions.size(); ++k) out << ",fiber_gap_phi" << k + 1;
    out << "\n";
    for (const auto& r : report.rows) {
        out << r.i << "," << to_string(r.parameter) << "," << num(r.d_h) << "," << to_string(r.d_v) << "," << num(r.d_w)
            << "," << num(r.d_w_error) << "," << r.facet_count << "," << to_string(r.map) << ","
            << num(r.distortion.eps_iso) << "," << num(r.distortion.eps_surj) << "," << num(r.distortion.eps_equiv) << ","
            << num(r.gh.lower) << "," << num(r.gh.upper) << "," << r.fp_count << "," << num(r.fp_gap) << ","
            << num(r.reconstruct_gap);
        for (double g : r.fiber_gap) out << "," << num(g);
        out << "\n";
    }
}

}  // namespace toricgh
