#include "toricgh/distances.hpp"

#include "toricgh/error.hpp"
#include "toricgh/parallel.hpp"
#include "toricgh/quadrature.hpp"
#include "toricgh/transport.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace toricgh {

namespace {

void check_dims(const HPolytope& p, const HPolytope& q) {
    if (p.dim() != q.dim()) fail(ErrorKind::DimensionMismatch, "polytopes differ in dimension");
}

double one_sided_hausdorff(const HPolytope& p, const HPolytope& q) {
    const NearestPointSolver solver(q);
    double best = 0;
    for (const auto& v : p.vertices()) {
        const auto x = to_double(v);
        double d = point_distance(x, q);
        if (d > 0) d = solver.distance(to_eigen(x));
        best = std::max(best, d);
    }
    return best;
}

}  // namespace

double d_hausdorff(const HPolytope& p, const HPolytope& q) {
    check_dims(p, q);
    return std::max(one_sided_hausdorff(p, q), one_sided_hausdorff(q, p));
}

Rational d_volume(const HPolytope& p, const HPolytope& q) {
    check_dims(p, q);
    Rational common = 0;
    try {
        common = volume(intersect(p, q));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Empty) throw;
    }
    return volume(p) + volume(q) - 2 * common;
}

double wasserstein_upper_bound(const HPolytope& p, const HPolytope& q) {
    check_dims(p, q);
    const double dp = diameter(p);
    const double dq = diameter(q);
    if (dp > 100 * dq) fail(ErrorKind::AssumptionViolated, "Diam(P) exceeds 100 Diam(Q)");
    const Rational vp = volume(p);
    const Rational vq = volume(q);
    const double ratio = to_double(d_volume(p, q) / std::min(vp, vq));
    return 2.0 * 101.0 * dq * std::sqrt(ratio);
}


namespace {

Integer floor_to_integer(const Rational& x) {
    Integer q = boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
    if (x < 0 && Rational(q) != x) --q;
    return q;
}

Integer ceil_to_integer(const Rational& x) {
    Integer f = floor_to_integer(x);
    return Rational(f) == x ? f : f + 1;
}

}  // namespace

std::vector<GridCell> grid_cells(const HPolytope& p, const Rational& h, std::size_t max_cells) {
    if (h <= 0) fail(ErrorKind::InvalidInput, "grid size must be positive");
    const std::size_t n = p.dim();
    std::vector<long> lo(n), extent(n);
    double cells = 1;
    for (std::size_t k = 0; k < n; ++k) {
        Rational mn = p.vertices().front()[k], mx = mn;
        for (const auto& v : p.vertices()) {
            mn = std::min(mn, v[k]);
            mx = std::max(mx, v[k]);
        }
        const Integer a = floor_to_integer(mn / h);
        const Integer b = ceil_to_integer(mx / h);
        lo[k] = a.convert_to<long>();
        extent[k] = (b - a).convert_to<long>();
        cells *= static_cast<double>(extent[k]);
    }
    if (cells > 64.0 * static_cast<double>(max_cells) + 1e6)
        fail(ErrorKind::TooLarge, "grid has too many cells for the support cap");

    const std::size_t total = static_cast<std::size_t>(cells);
    std::vector<std::optional<GridCell>> found(total);
    parallel_for(total, [&](std::size_t c) {
        RVector cl(n), ch(n);
        std::vector<long> index(n);
        std::size_t rest = c;
        for (std::size_t k = n; k-- > 0;) {
            index[k] = lo[k] + static_cast<long>(rest % static_cast<std::size_t>(extent[k]));
            rest /= static_cast<std::size_t>(extent[k]);
            cl[k] = h * index[k];
            ch[k] = h * (index[k] + 1);
        }
        bool full = true;
        for (std::size_t corner = 0; corner < (std::size_t{1} << n) && full; ++corner) {
            RVector x(n);
            for (std::size_t k = 0; k < n; ++k) x[k] = (corner >> k) & 1 ? ch[k] : cl[k];
            full = p.contains(x);
        }
        if (full) {
            GridCell cell{index, 1, Eigen::VectorXd(n)};
            for (std::size_t k = 0; k < n; ++k) {
                cell.centroid(static_cast<Eigen::Index>(k)) = to_double((cl[k] + ch[k]) / 2);
                cell.volume *= h;
            }
            found[c] = std::move(cell);
            return;
        }
        try {
            const RawMoments m = raw_moments(intersect(p, HPolytope::box(cl, ch)));
            GridCell cell{index, m.mass, Eigen::VectorXd(n)};
            for (std::size_t k = 0; k < n; ++k) cell.centroid(static_cast<Eigen::Index>(k)) = to_double(m.first[k] / m.mass);
            found[c] = std::move(cell);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Empty) throw;
        }
    });
    std::vector<GridCell> out;
    for (auto& f : found)
        if (f) out.push_back(std::move(*f));
    if (out.size() > max_cells)
        fail(ErrorKind::TooLarge, "grid meets P in " + std::to_string(out.size()) + " cells, above the cap " +
                                      std::to_string(max_cells));
    return out;
}

DiscreteMeasure discretize(const HPolytope& p, const Rational& h, std::size_t max_support) {
    const auto cells = grid_cells(p, h, max_support);
    const Rational vol_p = volume(p);
    DiscreteMeasure mu;
    mu.h = to_double(h);
    for (const auto& c : cells) {
        mu.points.push_back(c.centroid);
        mu.weights.push_back(to_double(c.volume / vol_p));
    }
    return mu;
}

namespace {

TransportPlan make_plan(const OTSolution& sol, const DiscreteMeasure& a, const DiscreteMeasure& b) {
    TransportPlan plan;
    std::vector<double> rows(a.size(), 0.0), cols(b.size(), 0.0);
    for (const auto& e : sol.plan) {
        plan.entries.push_back({e.i, e.j, e.mass});
        rows[e.i] += e.mass;
        cols[e.j] += e.mass;
    }
    plan.cost = sol.primal;
    for (std::size_t i = 0; i < a.size(); ++i) plan.row_residual = std::max(plan.row_residual, std::abs(rows[i] - a.weights[i]));
    for (std::size_t j = 0; j < b.size(); ++j) plan.col_residual = std::max(plan.col_residual, std::abs(cols[j] - b.weights[j]));
    return plan;
}

}  // namespace

WassersteinResult d_wasserstein(const HPolytope& p, const HPolytope& q, const WassersteinConfig& cfg) {
    check_dims(p, q);
    WassersteinResult r;
    r.source = discretize(p, cfg.h, cfg.max_support);
    r.target = discretize(q, cfg.h, cfg.max_support);
    bool exact = cfg.solver == SolverKind::Exact;
    if (cfg.solver == SolverKind::Auto) exact = r.source.size() + r.target.size() <= cfg.max_support;
    const Eigen::MatrixXd cost = squared_distance_matrix(r.source.points, r.target.points);
    OTSolution sol;
    if (exact) {
        r.solver = "exact";
        sol = solve_transport_exact(r.source.weights, r.target.weights, cost);
    } else {
        r.solver = "entropic";
        sol = solve_transport_entropic(r.source.weights, r.target.weights, cost);
        r.debiased_divergence = sinkhorn_divergence(r.source.weights, r.source.points, r.target.weights, r.target.points);
    }
    r.plan = make_plan(sol, r.source, r.target);
    r.value = std::sqrt(std::max(sol.primal, 0.0));
    r.solver_gap = std::max(0.0, r.value - std::sqrt(std::max(sol.dual, 0.0)));
    r.error_bound = 2.0 * r.source.h * std::sqrt(static_cast<double>(p.dim())) + r.solver_gap;
    return r;
}

MongeMapEstimate monge_map_estimate(const HPolytope& p, const HPolytope& q, const WassersteinConfig& cfg) {
    const WassersteinResult w = d_wasserstein(p, q, cfg);
    MongeMapEstimate est;
    est.source = w.source;
    const std::size_t n = p.dim();
    est.image.assign(w.source.size(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
    std::vector<double> mass(w.source.size(), 0.0);
    for (const auto& e : w.plan.entries) {
        est.image[e.i] += e.mass * w.target.points[e.j];
        mass[e.i] += e.mass;
    }
    for (std::size_t i = 0; i < est.image.size(); ++i)
        if (mass[i] > 0) est.image[i] /= mass[i];
    double res = 0;
    for (const auto& e : w.plan.entries) res += e.mass * (w.target.points[e.j] - est.image[e.i]).squaredNorm();
    est.pushforward_residual = std::sqrt(res);
    return est;
}

double MongeMapEstimate::max_displacement_error(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& reference) const {
    double worst = 0;
    for (std::size_t i = 0; i < image.size(); ++i) worst = std::max(worst, (image[i] - reference(source.points[i])).norm());
    return worst;
}

namespace {

struct Bump {
    double centre_first;
    double centre_rest;
    double sigma;
};

constexpr Bump kBumps[] = {{0.5, 0.5, 0.5}, {1.5, 0.5, 0.3}, {1.0, 0.25, 0.7}};

// Parses "x<k>" (1-based) into k-1; -1 when the text is not of that form.
long parse_coordinate(const std::string& s, std::size_t& pos, std::size_t dim) {
    if (pos >= s.size() || s[pos] != 'x') return -1;
    std::size_t end = pos + 1;
    while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
    if (end == pos + 1) return -1;
    const long k = std::stol(s.substr(pos + 1, end - pos - 1));
    if (k < 1 || static_cast<std::size_t>(k) > dim) return -1;
    pos = end;
    return k - 1;
}

}  // namespace

std::vector<std::string> test_function_names(std::size_t dim) {
    std::vector<std::string> names{"one"};
    for (std::size_t k = 1; k <= dim; ++k) names.push_back("x" + std::to_string(k));
    for (std::size_t k = 1; k <= dim; ++k)
        for (std::size_t l = k; l <= dim; ++l) names.push_back("x" + std::to_string(k) + "x" + std::to_string(l));
    names.push_back("sqnorm");
    for (int b = 1; b <= 3; ++b) names.push_back("bump" + std::to_string(b));
    return names;
}

ScalarField test_function(const std::string& name, std::size_t dim) {
    if (name.rfind("bump", 0) == 0 && name.size() == 5 && name[4] >= '1' && name[4] <= '3') {
        const Bump b = kBumps[name[4] - '1'];
        Eigen::VectorXd c = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), b.centre_rest);
        c(0) = b.centre_first;
        const double s2 = 2 * b.sigma * b.sigma;
        return [c, s2](const Eigen::VectorXd& x) { return std::exp(-(x - c).squaredNorm() / s2); };
    }
    if (name == "one") return [](const Eigen::VectorXd&) { return 1.0; };
    if (name == "sqnorm") return [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
    std::size_t pos = 0;
    const long k = parse_coordinate(name, pos, dim);
    if (k >= 0 && pos == name.size()) return [k](const Eigen::VectorXd& x) { return x(k); };
    if (k >= 0) {
        const long l = parse_coordinate(name, pos, dim);
        if (l >= 0 && pos == name.size()) return [k, l](const Eigen::VectorXd& x) { return x(k) * x(l); };
    }
    fail(ErrorKind::UnknownTestFunction, "unknown test function '" + name + "'");
}

double integrate_test_function(const HPolytope& p, const std::string& name) {
    const std::size_t n = p.dim();
    const ScalarField f = test_function(name, n);
    if (name.rfind("bump", 0) == 0) return integrate_polytope(p, f);
    const RawMoments m = raw_moments(p);
    if (name == "one") return to_double(m.mass);
    if (name == "sqnorm") {
        Rational tr = 0;
        for (std::size_t k = 0; k < n; ++k) tr += m.second[k][k];
        return to_double(tr);
    }
    std::size_t pos = 0;
    const long k = parse_coordinate(name, pos, n);
    if (pos == name.size()) return to_double(m.first[static_cast<std::size_t>(k)]);
    const long l = parse_coordinate(name, pos, n);
    return to_double(m.second[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]);
}

double average_test_function(const HPolytope& p, const std::string& name) {
    return integrate_test_function(p, name) / to_double(volume(p));
}

W2ConvergenceReport w2_convergence_check(const std::vector<HPolytope>& sequence, const HPolytope& q,
                                         const WassersteinConfig& cfg) {
    W2ConvergenceReport report;
    report.functions = test_function_names(q.dim());
    std::vector<double> target;
    for (const auto& f : report.functions) target.push_back(average_test_function(q, f));
    auto radius = [](const HPolytope& p) {
        double r = 0;
        for (const auto& v : p.vertices()) r = std::max(r, to_eigen(v).norm());
        return r;
    };
    report.common_radius = radius(q);
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        check_dims(sequence[i], q);
        W2ConvergenceRow row;
        row.index = i + 1;
        const WassersteinResult w = d_wasserstein(sequence[i], q, cfg);
        row.d_w = w.value;
        row.d_w_error = w.error_bound;
        for (std::size_t f = 0; f < report.functions.size(); ++f) {
            const double d = std::abs(average_test_function(sequence[i], report.functions[f]) - target[f]);
            row.discrepancy.push_back(d);
            row.max_discrepancy = std::max(row.max_discrepancy, d);
        }
        report.common_radius = std::max(report.common_radius, radius(sequence[i]));
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace toricgh
