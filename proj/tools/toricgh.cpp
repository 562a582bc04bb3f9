// toricgh: command-line front end.
//
//     toricgh check --polytope square
//     toricgh distance --kind volume --a pentagon_0.5.json --b rect.json
//     toricgh guillemin --polytope square --at 1/2,1/4
//     toricgh sample --polytope square --h 0.1 --delta 0.1 --torus-res 8 --out square.bin
//     toricgh gh --a dilation:9/8 --b square
//     toricgh experiment --family pentagon --steps 8 --out pentagon.csv
//     toricgh reproduce --out summary.txt
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 on bad input
// (a JSON error object is written to stderr).

#include "toricgh/acceptance.hpp"
#include "toricgh/delzant.hpp"
#include "toricgh/distances.hpp"
#include "toricgh/error.hpp"
#include "toricgh/experiment.hpp"
#include "toricgh/gh.hpp"
#include "toricgh/guillemin.hpp"
#include "toricgh/manifold_sample.hpp"
#include "toricgh/parallel.hpp"
#include "toricgh/polytope_io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using json = nlohmann::json;
using namespace toricgh;

namespace {

struct Options {
    std::size_t threads = 0;
    std::uint64_t seed = 0;
    bool json_out = false;

    std::string polytope, a, b, at, kind, solver = "auto", out, family = "pentagon";
    std::string h, delta, grid;
    int torus_res = 8;
    std::size_t steps = 5, max_pairs = 1000000;
    bool exhaustive = false;
    std::vector<int> only;
};

int usage_error(const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
    return 2;
}

Rational number(const std::string& text, const std::string& flag) {
    try {
        return parse_decimal(text);
    } catch (const Error&) {
        fail(ErrorKind::InvalidInput, flag + ": not a number: '" + text + "'");
    }
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json delzant_json(const DelzantReport& r) {
    json vs = json::array();
    for (const auto& v : r.vertices) {
        json dirs = json::array();
        for (const auto& row : v.edge_dirs) {
            json d = json::array();
            for (const auto& x : row) d.push_back(x.convert_to<long long>());
            dirs.push_back(d);
        }
        vs.push_back({{"vertex", vector_json(v.vertex)},
                      {"edge_dirs", dirs},
                      {"det", v.det.convert_to<long long>()},
                      {"simple", v.simple},
                      {"smooth", v.smooth}});
    }
    return {{"pass", r.pass}, {"vertices", vs}};
}

SampleConfig sample_config(const Options& o) {
    SampleConfig c;
    if (!o.h.empty()) c.h = number(o.h, "--h");
    if (!o.delta.empty()) c.delta = number(o.delta, "--delta");
    c.torus_res = o.torus_res;
    c.seed = o.seed;
    return c;
}

ToricManifoldSample sample_of(const std::string& name, const SampleConfig& c) {
    return ToricManifoldSample::build(GuilleminChart(DelzantPolytope::from(resolve_polytope(name))), c);
}

// Writes to --out when given, stdout otherwise.
void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!(f << text)) fail(ErrorKind::InvalidInput, "cannot write " + o.out);
}

int cmd_check(const Options& o) {
    const auto r = is_delzant(resolve_polytope(o.polytope));
    if (o.json_out) {
        emit(o, delzant_json(r).dump(2) + "\n");
    } else {
        std::ostringstream s;
        s << (r.pass ? "pass" : "fail") << "\n";
        for (const auto& v : r.vertices) {
            s << "  vertex (";
            for (std::size_t k = 0; k < v.vertex.size(); ++k) s << (k ? ", " : "") << to_string(v.vertex[k]);
            s << ") det " << v.det << (v.simple ? "" : " not simple") << (v.smooth ? "" : " not smooth") << "\n";
        }
        emit(o, s.str());
    }
    return r.pass ? 0 : 1;
}

int cmd_distance(const Options& o) {
    const HPolytope p = resolve_polytope(o.a), q = resolve_polytope(o.b);
    json j;
    if (o.kind == "hausdorff") {
        j = {{"value", d_hausdorff(p, q)}, {"error_bound", 0.0}, {"details", {{"method", "support function maximum"}}}};
    } else if (o.kind == "volume") {
        const Rational v = d_volume(p, q);
        j = {{"value", to_string(v)},
             {"error_bound", 0.0},
             {"details", {{"decimal", to_double(v)}, {"volume_a", to_string(volume(p))}, {"volume_b", to_string(volume(q))}}}};
    } else if (o.kind == "wasserstein") {
        WassersteinConfig c;
        if (!o.h.empty()) c.h = number(o.h, "--h");
        if (o.solver == "exact") c.solver = SolverKind::Exact;
        else if (o.solver == "entropic") c.solver = SolverKind::Entropic;
        else if (o.solver != "auto") fail(ErrorKind::InvalidInput, "--solver must be auto, exact or entropic");
        const auto w = d_wasserstein(p, q, c);
        j = {{"value", w.value},
             {"error_bound", w.error_bound},
             {"details",
              {{"solver", w.solver},
               {"solver_gap", w.solver_gap},
               {"h", to_string(c.h)},
               {"support_a", w.source.size()},
               {"support_b", w.target.size()},
               {"upper_bound", wasserstein_upper_bound(p, q)}}}};
    } else {
        fail(ErrorKind::InvalidInput, "--kind must be hausdorff, volume or wasserstein");
    }
    emit(o, j.dump(2) + "\n");
    return 0;
}

int cmd_guillemin(const Options& o) {
    const GuilleminChart c{DelzantPolytope::from(resolve_polytope(o.polytope))};
    std::vector<double> xs;
    std::stringstream in(o.at);
    for (std::string part; std::getline(in, part, ',');) xs.push_back(to_double(number(part, "--at")));
    if (xs.size() != c.dim()) fail(ErrorKind::DimensionMismatch, "--at needs " + std::to_string(c.dim()) + " coordinates");
    const Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const auto m = c.hessian(x);
    const json j = {{"at", xs},
                    {"potential", c.potential(x)},
                    {"G", matrix_json(m.g)},
                    {"G_inv", matrix_json(m.g_inv)},
                    {"orbit_volume", c.orbit_volume(x)}};
    emit(o, j.dump(2) + "\n");
    return 0;
}

int cmd_sample(const Options& o) {
    if (o.out.empty()) fail(ErrorKind::InvalidInput, "sample needs --out");
    const auto s = sample_of(o.polytope, sample_config(o));
    std::ofstream f(o.out, std::ios::binary);
    s.write(f);
    if (!f) fail(ErrorKind::InvalidInput, "cannot write " + o.out);
    const json j = {{"file", o.out},
                    {"nodes", s.node_count()},
                    {"bases", s.base_count()},
                    {"vertices", s.vertex_count()},
                    {"total_measure", to_string(s.total_measure())},
                    {"grid_scale", s.grid_scale()},
                    {"fiber_resolution", s.fiber_resolution()},
                    {"diameter", s.diameter()}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_gh(const Options& o) {
    const SampleConfig c = sample_config(o);
    const auto x = sample_of(o.a, c);
    const auto y = sample_of(o.b, c);
    DistortionOptions d;
    d.max_pairs = o.max_pairs;
    d.exhaustive = o.exhaustive;
    d.seed = o.seed;
    ApproxMap f;
    try {
        f = build_approx_map(x, y);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NormalFanMismatch) throw;
        f = build_greedy_map(x, y);
    }
    const auto eps = eqgh_distortion(f, d);
    const auto gh = gh_bounds(x, y, d);
    const json j = {{"map", to_string(f.kind)},
                    {"eps_iso", eps.eps_iso},
                    {"eps_surj", eps.eps_surj},
                    {"eps_equiv", eps.eps_equiv},
                    {"eps", eps.eps},
                    {"pairs", eps.pairs},
                    {"exhaustive", eps.exhaustive},
                    {"gh_lower", gh.lower},
                    {"gh_upper", gh.upper},
                    {"gh_upper_map", to_string(gh.upper_map)},
                    {"grid_scale", std::max(x.grid_scale(), y.grid_scale())}};
    emit(o, j.dump(2) + "\n");
    return 0;
}

int cmd_experiment(const Options& o) {
    ExperimentConfig c;
    c.family = o.family;
    c.steps = o.steps;
    if (!o.grid.empty()) c.h = number(o.grid, "--grid");
    if (!o.delta.empty()) c.delta = number(o.delta, "--delta");
    c.torus_res = o.torus_res;
    c.seed = o.seed;
    c.max_pairs = o.max_pairs;
    c.exhaustive = o.exhaustive;
    if (!o.h.empty()) c.wasserstein.h = number(o.h, "--h");
    std::ostringstream s;
    write_csv(s, run_experiment(c));
    emit(o, s.str());
    return 0;
}

int cmd_reproduce(const Options& o) {
    AcceptanceOptions a;
    a.seed = o.seed;
    a.only = o.only;
    const auto results = run_acceptance(a, [&](const CriterionResult& r) {
        if (!o.json_out) std::cout << format_result(r) << std::endl;
    });
    bool all = true;
    std::ostringstream summary;
    json j = json::array();
    for (const auto& r : results) {
        all = all && r.passed;
        summary << format_result(r) << "\n";
        j.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}});
    }
    const std::size_t passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    summary << passed << "/" << results.size() << " criteria passed\n";
    const std::string text = o.json_out ? json{{"criteria", j}, {"passed", passed}, {"total", results.size()}}.dump(2) + "\n"
                                        : summary.str();
    if (!o.out.empty()) {
        emit(o, text);
    } else if (o.json_out) {
        std::cout << text;
    } else {
        std::cout << passed << "/" << results.size() << " criteria passed\n";
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distances on Delzant polytopes and equivariant GH diagnostics for toric manifolds"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--threads", o.threads, "worker threads (0: all cores)");
    app.add_option("--seed", o.seed, "seed for every random choice");
    app.add_flag("--json", o.json_out, "JSON output where text is the default");

    auto* check = app.add_subcommand("check", "verify the Delzant condition");
    check->add_option("--polytope", o.polytope, "JSON file or catalog name")->required();
    check->add_option("--out", o.out);

    auto* distance = app.add_subcommand("distance", "Hausdorff, volume or Wasserstein distance");
    distance->add_option("--kind", o.kind)->required()->check(CLI::IsMember({"hausdorff", "volume", "wasserstein"}));
    distance->add_option("--a", o.a)->required();
    distance->add_option("--b", o.b)->required();
    distance->add_option("--h", o.h, "Wasserstein grid spacing (default 1/20)");
    distance->add_option("--solver", o.solver)->check(CLI::IsMember({"auto", "exact", "entropic"}));
    distance->add_option("--out", o.out);

    auto* guillemin = app.add_subcommand("guillemin", "Guillemin potential and metric at a point");
    guillemin->add_option("--polytope", o.polytope)->required();
    guillemin->add_option("--at", o.at, "comma separated coordinates")->required();
    guillemin->add_option("--out", o.out);

    auto* sample = app.add_subcommand("sample", "build and save a discrete toric manifold");
    sample->add_option("--polytope", o.polytope)->required();
    sample->add_option("--h", o.h, "grid spacing (default 1/10)");
    sample->add_option("--delta", o.delta, "boundary inset (default 1/10)");
    sample->add_option("--torus-res", o.torus_res, "fiber points per circle");
    sample->add_option("--out", o.out)->required();

    auto* gh = app.add_subcommand("gh", "equivariant GH distortion and GH bounds between two samples");
    gh->add_option("--a", o.a)->required();
    gh->add_option("--b", o.b)->required();
    gh->add_option("--h", o.h);
    gh->add_option("--delta", o.delta);
    gh->add_option("--torus-res", o.torus_res);
    gh->add_option("--max-pairs", o.max_pairs);
    gh->add_flag("--exhaustive", o.exhaustive);
    gh->add_option("--out", o.out);

    auto* experiment = app.add_subcommand("experiment", "run a converging family and write CSV");
    experiment->add_option("--family", o.family)->check(CLI::IsMember({"pentagon", "dilation", "rectangle"}));
    experiment->add_option("--steps", o.steps);
    experiment->add_option("--grid", o.grid, "sample grid spacing (default 1/10)");
    experiment->add_option("--delta", o.delta);
    experiment->add_option("--torus-res", o.torus_res);
    experiment->add_option("--h", o.h, "Wasserstein grid spacing (default 1/20)");
    experiment->add_option("--max-pairs", o.max_pairs);
    experiment->add_flag("--exhaustive", o.exhaustive);
    experiment->add_option("--out", o.out);

    auto* reproduce = app.add_subcommand("reproduce", "run the acceptance suite");
    reproduce->add_option("--only", o.only, "criterion ids");
    reproduce->add_option("--out", o.out, "summary file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return usage_error("InvalidInput", e.what());
    }

    try {
        set_thread_count(o.threads);
        if (*check) return cmd_check(o);
        if (*distance) return cmd_distance(o);
        if (*guillemin) return cmd_guillemin(o);
        if (*sample) return cmd_sample(o);
        if (*gh) return cmd_gh(o);
        if (*experiment) return cmd_experiment(o);
        return cmd_reproduce(o);
    } catch (const Error& e) {
        return usage_error(std::string(to_string(e.kind())), e.what());
    } catch (const std::exception& e) {
        return usage_error("InvalidInput", e.what());
    }
}
