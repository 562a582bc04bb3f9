#include "toricgh/transport.hpp"

#include "toricgh/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace toricgh {

Eigen::MatrixXd squared_distance_matrix(const std::vector<Eigen::VectorXd>& x, const std::vector<Eigen::VectorXd>& y) {
    Eigen::MatrixXd c(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (x[i] - y[j]).squaredNorm();
    return c;
}

double c_transform_dual(const std::vector<double>& a, const std::vector<double>& b, const Eigen::MatrixXd& cost,
                        const Eigen::VectorXd& g) {
    double dual = 0;
    for (Eigen::Index i = 0; i < cost.rows(); ++i) dual += a[static_cast<std::size_t>(i)] * (cost.row(i).transpose() - g).minCoeff();
    for (Eigen::Index j = 0; j < cost.cols(); ++j) dual += b[static_cast<std::size_t>(j)] * g(j);
    return dual;
}

namespace {

constexpr double kUnits = 1099511627776.0;  // 2^40

// Integer masses summing to exactly kUnits, largest remainders rounded up.
std::vector<std::int64_t> to_units(const std::vector<double>& w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<std::int64_t> u(w.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double x = w[i] / total * kUnits;
        u[i] = static_cast<std::int64_t>(std::floor(x));
        sum += u[i];
        rem.emplace_back(x - std::floor(x), i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& p, const auto& q) { return p.first > q.first; });
    for (std::size_t r = 0; sum < static_cast<std::int64_t>(kUnits); ++r, ++sum) ++u[rem[r % rem.size()].second];
    return u;
}

class NetworkSimplex {
public:
    NetworkSimplex(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b, const Eigen::MatrixXd& cost)
        : m_(a.size()), k_(b.size()), root_(m_ + k_), cost_(cost), nodes_(m_ + k_ + 1) {
        max_cost_ = cost.size() > 0 ? cost.maxCoeff() : 0.0;
        big_m_ = (max_cost_ + 1.0) * static_cast<double>(nodes_);
        art_up_.assign(nodes_, false);
        adj_.assign(nodes_, {});
        for (std::size_t i = 0; i < m_; ++i) {
            art_up_[i] = a[i] > 0;
            add_tree_arc(artificial(i), a[i]);
        }
        for (std::size_t j = 0; j < k_; ++j) add_tree_arc(artificial(m_ + j), b[j]);
        parent_.resize(nodes_);
        pred_.resize(nodes_);
        up_.resize(nodes_);
        depth_.resize(nodes_);
        pi_.resize(nodes_);
        rebuild();
    }

    std::size_t run() {
        const std::int64_t arcs = static_cast<std::int64_t>(m_ * k_);
        const std::int64_t block = std::max<std::int64_t>(10, static_cast<std::int64_t>(std::sqrt(static_cast<double>(arcs))));
        const double tol = 1e-12 * std::max(1.0, max_cost_) * 16;
        std::int64_t next = 0;
        std::size_t pivots = 0;
        for (;;) {
            std::int64_t best = -1;
            double best_rc = -tol;
            std::int64_t scanned = 0;
            while (scanned < arcs) {
                const std::int64_t end = std::min(scanned + block, arcs);
                for (; scanned < end; ++scanned) {
                    const std::int64_t e = next;
                    next = next + 1 == arcs ? 0 : next + 1;
                    const std::size_t i = static_cast<std::size_t>(e) / k_;
                    const std::size_t j = static_cast<std::size_t>(e) % k_;
                    const double rc = cost_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) + pi_[i] - pi_[m_ + j];
                    if (rc < best_rc) {
                        best_rc = rc;
                        best = e;
                    }
                }
                if (best >= 0) break;
            }
            if (best < 0) break;
            pivot(best);
            ++pivots;
        }
        return pivots;
    }

    std::vector<PlanEntry> plan() const {
        std::vector<PlanEntry> out;
        for (const auto& [e, f] : flow_) {
            if (e >= artificial(0)) {
                if (f > 0) fail(ErrorKind::SolverDiverged, "network simplex left flow on an artificial arc");
                continue;
            }
            if (f > 0)
                out.push_back({static_cast<std::size_t>(e) / k_, static_cast<std::size_t>(e) % k_,
                               static_cast<double>(f) / kUnits});
        }
        std::sort(out.begin(), out.end(), [](const PlanEntry& p, const PlanEntry& q) {
            return p.i != q.i ? p.i < q.i : p.j < q.j;
        });
        return out;
    }

    Eigen::VectorXd sink_potentials() const {
        Eigen::VectorXd g(static_cast<Eigen::Index>(k_));
        for (std::size_t j = 0; j < k_; ++j) g(static_cast<Eigen::Index>(j)) = pi_[m_ + j];
        return g;
    }

private:
    std::int64_t artificial(std::size_t node) const { return static_cast<std::int64_t>(m_ * k_ + node); }

    std::size_t source(std::int64_t e) const {
        if (e < artificial(0)) return static_cast<std::size_t>(e) / k_;
        const std::size_t u = static_cast<std::size_t>(e - artificial(0));
        return art_up_[u] ? u : root_;
    }
    std::size_t target(std::int64_t e) const {
        if (e < artificial(0)) return m_ + static_cast<std::size_t>(e) % k_;
        const std::size_t u = static_cast<std::size_t>(e - artificial(0));
        return art_up_[u] ? root_ : u;
    }
    double arc_cost(std::int64_t e) const {
        if (e >= artificial(0)) return big_m_;
        return cost_(static_cast<Eigen::Index>(static_cast<std::size_t>(e) / k_),
                     static_cast<Eigen::Index>(static_cast<std::size_t>(e) % k_));
    }

    void add_tree_arc(std::int64_t e, std::int64_t f) {
        flow_[e] = f;
        adj_[source(e)].push_back(e);
        adj_[target(e)].push_back(e);
    }

    void remove_tree_arc(std::int64_t e) {
        flow_.erase(e);
        for (std::size_t u : {source(e), target(e)}) {
            auto& v = adj_[u];
            auto it = std::find(v.begin(), v.end(), e);
            *it = v.back();
            v.pop_back();
        }
    }

    void rebuild() {
        std::vector<char> seen(nodes_, 0);
        std::deque<std::size_t> queue{root_};
        seen[root_] = 1;
        parent_[root_] = root_;
        depth_[root_] = 0;
        pi_[root_] = 0;
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            for (std::int64_t e : adj_[u]) {
                const std::size_t s = source(e), t = target(e);
                const std::size_t w = s == u ? t : s;
                if (seen[w]) continue;
                seen[w] = 1;
                parent_[w] = u;
                pred_[w] = e;
                up_[w] = s == w;
                depth_[w] = depth_[u] + 1;
                pi_[w] = up_[w] ? pi_[u] - arc_cost(e) : pi_[u] + arc_cost(e);
                queue.push_back(w);
            }
        }
    }

    void pivot(std::int64_t in) {
        const std::size_t first = source(in);
        const std::size_t second = target(in);
        std::size_t x = first, y = second;
        while (x != y) {
            if (depth_[x] >= depth_[y]) x = parent_[x];
            else y = parent_[y];
        }
        const std::size_t join = x;

        std::int64_t delta = std::numeric_limits<std::int64_t>::max();
        std::int64_t out = -1;
        for (std::size_t u = first; u != join; u = parent_[u]) {
            if (!up_[u]) continue;
            const std::int64_t f = flow_.at(pred_[u]);
            if (f < delta) {
                delta = f;
                out = pred_[u];
            }
        }
        for (std::size_t u = second; u != join; u = parent_[u]) {
            if (up_[u]) continue;
            const std::int64_t f = flow_.at(pred_[u]);
            if (f <= delta) {
                delta = f;
                out = pred_[u];
            }
        }
        if (out < 0) fail(ErrorKind::SolverDiverged, "unbounded pivot in network simplex");
        if (delta > 0) {
            for (std::size_t u = first; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? -delta : delta;
            for (std::size_t u = second; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? delta : -delta;
        }
        remove_tree_arc(out);
        add_tree_arc(in, delta);
        rebuild();
    }

    std::size_t m_, k_, root_;
    const Eigen::MatrixXd& cost_;
    std::size_t nodes_;
    double max_cost_ = 0;
    double big_m_ = 0;
    std::vector<bool> art_up_;
    std::vector<std::vector<std::int64_t>> adj_;
    std::unordered_map<std::int64_t, std::int64_t> flow_;
    std::vector<std::size_t> parent_;
    std::vector<std::int64_t> pred_;
    std::vector<bool> up_;
    std::vector<std::size_t> depth_;
    std::vector<double> pi_;
};

double plan_cost(const std::vector<PlanEntry>& plan, const Eigen::MatrixXd& cost) {
    double c = 0;
    for (const auto& e : plan) c += e.mass * cost(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j));
    return c;
}

void check_marginals(const std::vector<double>& a, const std::vector<double>& b, const Eigen::MatrixXd& cost) {
    if (a.size() != static_cast<std::size_t>(cost.rows()) || b.size() != static_cast<std::size_t>(cost.cols()))
        fail(ErrorKind::DimensionMismatch, "marginals do not match the cost matrix");
    if (a.empty() || b.empty()) fail(ErrorKind::InvalidInput, "empty marginal");
    for (double w : a)
        if (!(w >= 0)) fail(ErrorKind::InvalidInput, "negative weight");
    for (double w : b)
        if (!(w >= 0)) fail(ErrorKind::InvalidInput, "negative weight");
}

double log_sum_exp(const Eigen::VectorXd& v) {
    const double mx = v.maxCoeff();
    if (!std::isfinite(mx)) return mx;
    return mx + std::log((v.array() - mx).exp().sum());
}

struct SinkhornState {
    Eigen::VectorXd f;
    Eigen::VectorXd g;
    double eps = 0;
};

SinkhornState run_sinkhorn(const std::vector<double>& a, const std::vector<double>& b, const Eigen::MatrixXd& cost,
                           const SinkhornOptions& opt) {
    const Eigen::Index m = cost.rows(), k = cost.cols();
    Eigen::VectorXd log_a(m), log_b(k);
    for (Eigen::Index i = 0; i < m; ++i) log_a(i) = std::log(a[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < k; ++j) log_b(j) = std::log(b[static_cast<std::size_t>(j)]);
    double scale = opt.reference > 0 ? opt.reference : cost.maxCoeff();
    if (scale <= 0) scale = 1;
    SinkhornState s{Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(k), 0};
    Eigen::VectorXd buf_row(k), buf_col(m);
    for (double factor : opt.schedule) {
        s.eps = factor * scale;
        for (std::size_t it = 0; it < opt.iterations_per_stage; ++it) {
            for (Eigen::Index i = 0; i < m; ++i) {
                buf_row = (s.g - cost.row(i).transpose()) / s.eps + log_b;
                s.f(i) = -s.eps * log_sum_exp(buf_row);
            }
            for (Eigen::Index j = 0; j < k; ++j) {
                buf_col = (s.f - cost.col(j)) / s.eps + log_a;
                s.g(j) = -s.eps * log_sum_exp(buf_col);
            }
        }
        if (!s.f.allFinite() || !s.g.allFinite())
            fail(ErrorKind::SolverDiverged, "Sinkhorn potentials became non-finite");
    }
    return s;
}

}  // namespace

OTSolution solve_transport_exact(const std::vector<double>& a, const std::vector<double>& b, const Eigen::MatrixXd& cost) {
    check_marginals(a, b, cost);
    NetworkSimplex ns(to_units(a), to_units(b), cost);
    OTSolution sol;
    sol.iterations = ns.run();
    sol.plan = ns.plan();
    sol.primal = plan_cost(sol.plan, cost);
    sol.dual = std::min(sol.primal, c_transform_dual(a, b, cost, ns.sink_potentials()));
    return sol;
}

OTSolution solve_transport_entropic(const std::vector<double>& a, const std::vector<double>& b,
                                    const Eigen::MatrixXd& cost, const SinkhornOptions& opt) {
    check_marginals(a, b, cost);
    const SinkhornState s = run_sinkhorn(a, b, cost, opt);
    const Eigen::Index m = cost.rows(), k = cost.cols();
    Eigen::MatrixXd pi(m, k);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            pi(i, j) = std::exp((s.f(i) + s.g(j) - cost(i, j)) / s.eps) * a[static_cast<std::size_t>(i)] *
                       b[static_cast<std::size_t>(j)];

    Eigen::Map<const Eigen::VectorXd> av(a.data(), m), bv(b.data(), k);
    const double err = (pi.rowwise().sum() - av).lpNorm<1>() + (pi.colwise().sum().transpose() - bv).lpNorm<1>();
    if (!std::isfinite(err) || err > opt.divergence_tolerance)
        fail(ErrorKind::SolverDiverged, "Sinkhorn marginals did not converge");

    // Rounding onto the transport polytope (Altschuler, Weed, Rigollet 2017, Algorithm 2).
    Eigen::VectorXd r = pi.rowwise().sum();
    for (Eigen::Index i = 0; i < m; ++i)
        if (r(i) > av(i)) pi.row(i) *= av(i) / r(i);
    Eigen::VectorXd c = pi.colwise().sum().transpose();
    for (Eigen::Index j = 0; j < k; ++j)
        if (c(j) > bv(j)) pi.col(j) *= bv(j) / c(j);
    const Eigen::VectorXd er = av - pi.rowwise().sum();
    const Eigen::VectorXd ec = bv - pi.colwise().sum().transpose();
    const double l1 = ec.sum();
    if (l1 > 0) pi += er * ec.transpose() / l1;

    OTSolution sol;
    sol.iterations = opt.schedule.size() * opt.iterations_per_stage;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            if (pi(i, j) > 0) sol.plan.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), pi(i, j)});
    sol.primal = plan_cost(sol.plan, cost);
    sol.dual = std::min(sol.primal, c_transform_dual(a, b, cost, s.g));
    return sol;
}

double entropic_cost(const std::vector<double>& a, const std::vector<double>& b, const Eigen::MatrixXd& cost,
                     const SinkhornOptions& opt) {
    check_marginals(a, b, cost);
    const SinkhornState s = run_sinkhorn(a, b, cost, opt);
    double v = 0;
    for (Eigen::Index i = 0; i < cost.rows(); ++i) v += a[static_cast<std::size_t>(i)] * s.f(i);
    for (Eigen::Index j = 0; j < cost.cols(); ++j) v += b[static_cast<std::size_t>(j)] * s.g(j);
    return v;
}

double sinkhorn_divergence(const std::vector<double>& a, const std::vector<Eigen::VectorXd>& x,
                           const std::vector<double>& b, const std::vector<Eigen::VectorXd>& y,
                           const SinkhornOptions& opt) {
    const Eigen::MatrixXd cxy = squared_distance_matrix(x, y);
    SinkhornOptions fixed = opt;
    if (fixed.reference <= 0) fixed.reference = cxy.maxCoeff() > 0 ? cxy.maxCoeff() : 1.0;
    const double xy = entropic_cost(a, b, cxy, fixed);
    const double xx = entropic_cost(a, a, squared_distance_matrix(x, x), fixed);
    const double yy = entropic_cost(b, b, squared_distance_matrix(y, y), fixed);
    return xy - 0.5 * (xx + yy);
}

}  // namespace toricgh
