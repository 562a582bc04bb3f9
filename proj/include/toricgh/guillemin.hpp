#pragma once

// The Guillemin Kähler metric on P° x T^n, T^n = (R/Z)^n, of a Delzant polytope P.
//
//     g_P(x) = 1/2 sum_r l_r(x) log l_r(x),    G_P(x) = Hess g_P = 1/2 sum_r nu_r nu_r^T / l_r(x),
//
// with metric diag(G_P, G_P^{-1}) in the coordinates (x, y).

#include "toricgh/delzant.hpp"

#include <Eigen/Dense>

#include <vector>

namespace toricgh {

struct MetricTensor {
    Eigen::MatrixXd g;
    Eigen::MatrixXd g_inv;
    Eigen::VectorXd at;
};

struct PathPoint {
    Eigen::VectorXd x;  // base, in the interior of P
    Eigen::VectorXd y;  // fiber, read modulo Z^n
};

class GuilleminChart {
public:
    explicit GuilleminChart(const DelzantPolytope& p);

    const HPolytope& polytope() const { return polytope_; }
    std::size_t dim() const { return polytope_.dim(); }

    /// l_r(x) for every facet; throws BoundaryOrExterior unless all are positive.
    Eigen::VectorXd slacks(const Eigen::VectorXd& x) const;

    double potential(const Eigen::VectorXd& x) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
    MetricTensor hessian(const Eigen::VectorXd& x) const;

    /// Midpoint rule on each segment, fiber increments taken as the shortest representative mod Z^n.
    double metric_length(const std::vector<PathPoint>& path) const;

    /// det(G_P(x))^{-1/2}: volume of the flat fiber torus over x.
    double orbit_volume(const Eigen::VectorXd& x) const;

    /// Length of the base segment from a vertex v to an interior point x at constant fiber coordinate.
    /// The integrand blows up like s^{-1/2} at v, so s = u^2 and Gauss-Legendre in u.
    double radial_length(const Eigen::VectorXd& v, const Eigen::VectorXd& x, int nodes = 24) const;

private:
    HPolytope polytope_;
    Eigen::MatrixXd normals_;  // N x n
    Eigen::VectorXd offsets_;
};

struct FixedPoints {
    std::vector<RVector> moment_images;
    std::size_t euler_characteristic = 0;
};

FixedPoints fixed_points(const DelzantPolytope& p);

/// Shortest representative of a fiber increment in (-1/2, 1/2]^n.
Eigen::VectorXd torus_difference(const Eigen::VectorXd& dy);

}  // namespace toricgh
