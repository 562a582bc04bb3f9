#pragma once

#include "toricgh/polytope.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace toricgh {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// Grundmann-Moller cubature of degree 2s+1 on the simplex with the given n+1 vertices.
double integrate_simplex(const std::vector<Eigen::VectorXd>& vertices, const ScalarField& f, int s);

/// Integral over P: simplices of the fan triangulation are bisected along their longest edge
/// until every edge is at most max_edge, then integrated with the degree 2s+1 rule.
double integrate_polytope(const HPolytope& p, const ScalarField& f, int s = 4, double max_edge = 0.5);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace toricgh
