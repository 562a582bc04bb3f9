#pragma once

// Discrete optimal transport between two weighted point clouds with squared Euclidean cost.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace toricgh {

struct PlanEntry {
    std::size_t i;
    std::size_t j;
    double mass;
};

struct OTSolution {
    std::vector<PlanEntry> plan;
    double primal = 0;  // cost of the returned (feasible) plan
    double dual = 0;    // certified lower bound on the optimal cost
    std::size_t iterations = 0;
};

/// Squared distances, rows = source points, columns = target points.
Eigen::MatrixXd squared_distance_matrix(const std::vector<Eigen::VectorXd>& x, const std::vector<Eigen::VectorXd>& y);

/// Primal network simplex on the complete bipartite graph. Marginals are rounded onto a
/// common integer grid of 2^40 units so the pivots run in exact integer flow arithmetic.
OTSolution solve_transport_exact(const std::vector<double>& a, const std::vector<double>& b, const Eigen::MatrixXd& cost);

struct SinkhornOptions {
    std::vector<double> schedule{0.1, 0.03, 0.01, 0.003, 0.001};  // multiples of the reference scale
    double reference = 0;  // 0: use the largest entry of the cost matrix
    std::size_t iterations_per_stage = 500;
    double divergence_tolerance = 1e-1;  // marginal error before rounding that counts as failure
};

/// Log-domain Sinkhorn with epsilon annealing, then rounding onto the transport polytope.
/// Throws SolverDiverged on non-finite potentials or marginal error above the tolerance.
OTSolution solve_transport_entropic(const std::vector<double>& a, const std::vector<double>& b,
                                    const Eigen::MatrixXd& cost, const SinkhornOptions& opt = {});

/// Regularised cost <pi, C> + eps KL(pi | a b^T) at the final epsilon of the schedule.
double entropic_cost(const std::vector<double>& a, const std::vector<double>& b, const Eigen::MatrixXd& cost,
                     const SinkhornOptions& opt = {});

/// Debiased Sinkhorn divergence OT_eps(a,b) - (OT_eps(a,a) + OT_eps(b,b)) / 2.
double sinkhorn_divergence(const std::vector<double>& a, const std::vector<Eigen::VectorXd>& x,
                           const std::vector<double>& b, const std::vector<Eigen::VectorXd>& y,
                           const SinkhornOptions& opt = {});

/// Lower bound sum a_i min_j (C_ij - g_j) + sum b_j g_j, valid for any g.
double c_transform_dual(const std::vector<double>& a, const std::vector<double>& b, const Eigen::MatrixXd& cost,
                        const Eigen::VectorXd& g);

}  // namespace toricgh
