#include "toricgh/guillemin.hpp"

#include "toricgh/error.hpp"
#include "toricgh/quadrature.hpp"

#include <cmath>

namespace toricgh {

GuilleminChart::GuilleminChart(const DelzantPolytope& p) : polytope_(p.base()) {
    const auto& f = polytope_.facets();
    const Eigen::Index n = static_cast<Eigen::Index>(polytope_.dim());
    normals_.resize(static_cast<Eigen::Index>(f.size()), n);
    offsets_.resize(static_cast<Eigen::Index>(f.size()));
    for (std::size_t r = 0; r < f.size(); ++r) {
        for (Eigen::Index k = 0; k < n; ++k)
            normals_(static_cast<Eigen::Index>(r), k) = f[r].normal[static_cast<std::size_t>(k)].convert_to<double>();
        offsets_(static_cast<Eigen::Index>(r)) = to_double(f[r].offset);
    }
}

Eigen::VectorXd GuilleminChart::slacks(const Eigen::VectorXd& x) const {
    if (x.size() != normals_.cols()) fail(ErrorKind::DimensionMismatch, "point has wrong length");
    Eigen::VectorXd l = normals_ * x - offsets_;
    for (Eigen::Index r = 0; r < l.size(); ++r)
        if (!(l(r) > 0)) fail(ErrorKind::BoundaryOrExterior, "point is not in the interior of P");
    return l;
}

double GuilleminChart::potential(const Eigen::VectorXd& x) const {
    slacks(x);
    // Extended precision keeps the value smooth enough for second differences at step 1e-4.
    long double sum = 0;
    for (Eigen::Index r = 0; r < normals_.rows(); ++r) {
        long double l = -static_cast<long double>(offsets_(r));
        for (Eigen::Index k = 0; k < x.size(); ++k) l += static_cast<long double>(normals_(r, k)) * x(k);
        sum += l * std::log(l);
    }
    return static_cast<double>(sum / 2);
}

Eigen::VectorXd GuilleminChart::gradient(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd l = slacks(x);
    return 0.5 * normals_.transpose() * (l.array().log() + 1.0).matrix();
}

MetricTensor GuilleminChart::hessian(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd l = slacks(x);
    MetricTensor t;
    t.at = x;
    t.g = 0.5 * normals_.transpose() * l.cwiseInverse().asDiagonal() * normals_;
    Eigen::LLT<Eigen::MatrixXd> llt(t.g);
    if (llt.info() != Eigen::Success) fail(ErrorKind::InvalidInput, "metric is not positive definite");
    t.g_inv = llt.solve(Eigen::MatrixXd::Identity(t.g.rows(), t.g.cols()));
    return t;
}

Eigen::VectorXd torus_difference(const Eigen::VectorXd& dy) {
    Eigen::VectorXd d = dy;
    for (Eigen::Index k = 0; k < d.size(); ++k) {
        d(k) -= std::floor(d(k));
        if (d(k) > 0.5) d(k) -= 1.0;
    }
    return d;
}

double GuilleminChart::metric_length(const std::vector<PathPoint>& path) const {
    for (const auto& pt : path) slacks(pt.x);
    double len = 0;
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
        const Eigen::VectorXd dx = path[s + 1].x - path[s].x;
        const Eigen::VectorXd dy = torus_difference(path[s + 1].y - path[s].y);
        const MetricTensor t = hessian(0.5 * (path[s].x + path[s + 1].x));
        len += std::sqrt(std::max(0.0, dx.dot(t.g * dx) + dy.dot(t.g_inv * dy)));
    }
    return len;
}

double GuilleminChart::orbit_volume(const Eigen::VectorXd& x) const {
    return 1.0 / std::sqrt(hessian(x).g.determinant());
}

double GuilleminChart::radial_length(const Eigen::VectorXd& v, const Eigen::VectorXd& x, int nodes) const {
    std::vector<double> u, w;
    gauss_legendre(nodes, u, w);
    const Eigen::VectorXd d = x - v;
    double len = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Eigen::VectorXd p = v + u[i] * u[i] * d;
        len += w[i] * 2.0 * u[i] * std::sqrt(d.dot(hessian(p).g * d));
    }
    return len;
}

FixedPoints fixed_points(const DelzantPolytope& p) {
    return {p.base().vertices(), p.base().vertices().size()};
}

}  // namespace toricgh
