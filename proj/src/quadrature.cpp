#include "toricgh/quadrature.hpp"

#include "toricgh/error.hpp"

#include <cmath>

namespace toricgh {

namespace {

double factorial(int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// All compositions of `total` into `parts` nonnegative integers.
void compositions(int total, int parts, std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& fn) {
    if (static_cast<int>(cur.size()) == parts - 1) {
        cur.push_back(total);
        fn(cur);
        cur.pop_back();
        return;
    }
    for (int x = 0; x <= total; ++x) {
        cur.push_back(x);
        compositions(total - x, parts, cur, fn);
        cur.pop_back();
    }
}

double simplex_measure(const std::vector<Eigen::VectorXd>& v) {
    const Eigen::Index n = v.front().size();
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index k = 0; k < n; ++k) m.col(k) = v[static_cast<std::size_t>(k) + 1] - v[0];
    return std::abs(m.determinant()) / factorial(static_cast<int>(n));
}

void bisect_and_integrate(const std::vector<Eigen::VectorXd>& v, const ScalarField& f, int s, double max_edge,
                          double& acc) {
    std::size_t bi = 0, bj = 1;
    double longest = -1;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const double len = (v[i] - v[j]).norm();
            if (len > longest) {
                longest = len;
                bi = i;
                bj = j;
            }
        }
    if (longest <= max_edge) {
        acc += integrate_simplex(v, f, s);
        return;
    }
    const Eigen::VectorXd mid = 0.5 * (v[bi] + v[bj]);
    auto left = v;
    left[bi] = mid;
    auto right = v;
    right[bj] = mid;
    bisect_and_integrate(left, f, s, max_edge, acc);
    bisect_and_integrate(right, f, s, max_edge, acc);
}

}  // namespace

double integrate_simplex(const std::vector<Eigen::VectorXd>& vertices, const ScalarField& f, int s) {
    const int d = static_cast<int>(vertices.size()) - 1;
    if (d < 1 || s < 0) fail(ErrorKind::InvalidInput, "bad cubature request");
    const double vol = simplex_measure(vertices);
    double total = 0;
    std::vector<int> cur;
    for (int i = 0; i <= s; ++i) {
        const int denom = d + 1 + 2 * s - 2 * i;
        const double w = ((i % 2) ? -1.0 : 1.0) * std::pow(2.0, -2 * s) * std::pow(denom, 2 * s + 1) /
                         (factorial(i) * factorial(d + 1 + 2 * s - i));
        double inner = 0;
        compositions(s - i, d + 1, cur, [&](const std::vector<int>& beta) {
            Eigen::VectorXd x = Eigen::VectorXd::Zero(vertices.front().size());
            for (int k = 0; k <= d; ++k) x += (2.0 * beta[static_cast<std::size_t>(k)] + 1.0) / denom * vertices[static_cast<std::size_t>(k)];
            inner += f(x);
        });
        total += w * inner;
    }
    return total * vol * factorial(d);
}

double integrate_polytope(const HPolytope& p, const ScalarField& f, int s, double max_edge) {
    const FaceLattice lattice(p);
    double acc = 0;
    for (const auto& simplex : lattice.triangulate()) {
        std::vector<Eigen::VectorXd> v;
        for (auto idx : simplex) v.push_back(to_eigen(p.vertices()[idx]));
        bisect_and_integrate(v, f, s, max_edge, acc);
    }
    return acc;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1;
            dp = n * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[static_cast<std::size_t>(i)] = 0.5 * (1 - x);
        weights[static_cast<std::size_t>(i)] = 1.0 / ((1 - x * x) * dp * dp);
    }
}

}  // namespace toricgh
