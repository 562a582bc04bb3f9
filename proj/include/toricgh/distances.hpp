#pragma once

// Hausdorff, symmetric-difference volume and L2-Wasserstein distances between polytopes.

#include "toricgh/polytope.hpp"
#include "toricgh/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace toricgh {

double d_hausdorff(const HPolytope& p, const HPolytope& q);
Rational d_volume(const HPolytope& p, const HPolytope& q);

/// A cell [k h, (k+1) h] of the axis grid intersected with P (positive volume only).
struct GridCell {
    std::vector<long> index;
    Rational volume;
    Eigen::VectorXd centroid;
};

/// Cells in lexicographic index order. Throws TooLarge above max_cells.
std::vector<GridCell> grid_cells(const HPolytope& p, const Rational& h, std::size_t max_cells);

/// Uniform probability measure on a polytope, lumped onto grid cells.
struct DiscreteMeasure {
    std::vector<Eigen::VectorXd> points;
    std::vector<double> weights;
    std::string source;
    double h = 0;

    std::size_t size() const { return points.size(); }
};

/// Cells [k h, (k+1) h] of the axis grid, clipped exactly against P. Each cell of positive
/// volume contributes its centroid with weight vol(cell ∩ P) / |P|.
/// Throws TooLarge when more than max_support cells meet P.
DiscreteMeasure discretize(const HPolytope& p, const Rational& h, std::size_t max_support = 4000);

enum class SolverKind { Auto, Exact, Entropic };

struct WassersteinConfig {
    Rational h{1, 20};
    SolverKind solver = SolverKind::Auto;
    std::size_t max_support = 4000;  // per body, and combined cap for the exact solver under Auto
};

struct TransportEntry {
    std::size_t i;
    std::size_t j;
    double mass;
};

struct TransportPlan {
    std::vector<TransportEntry> entries;
    double cost = 0;          // sum of mass * |x_i - y_j|^2
    double row_residual = 0;  // max |sum_j pi_ij - a_i|
    double col_residual = 0;
};

struct WassersteinResult {
    double value = 0;
    double error_bound = 0;
    double solver_gap = 0;
    std::string solver;
    double debiased_divergence = 0;  // entropic solver only
    TransportPlan plan;
    DiscreteMeasure source;
    DiscreteMeasure target;
};

WassersteinResult d_wasserstein(const HPolytope& p, const HPolytope& q, const WassersteinConfig& cfg = {});

/// Coupling bound 202 Diam(Q) sqrt(d^V(P,Q) / min(|P|,|Q|)). Throws AssumptionViolated if Diam(P) > 100 Diam(Q).
double wasserstein_upper_bound(const HPolytope& p, const HPolytope& q);

struct MongeMapEstimate {
    DiscreteMeasure source;
    std::vector<Eigen::VectorXd> image;  // T(x_i), barycentric projection of the plan
    double pushforward_residual = 0;     // sqrt(sum pi_ij |y_j - T(x_i)|^2)
    double max_displacement_error(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& reference) const;
};

MongeMapEstimate monge_map_estimate(const HPolytope& p, const HPolytope& q, const WassersteinConfig& cfg = {});

/// Fixed dictionary of test functions: "one", "x<k>", "x<k>x<l>", "sqnorm", "bump1".."bump3".
std::vector<std::string> test_function_names(std::size_t dim);

/// Pointwise evaluator of a dictionary test function; UnknownTestFunction otherwise.
ScalarField test_function(const std::string& name, std::size_t dim);

/// Exact for polynomial test functions; bumps use Grundmann-Moller cubature on the triangulation.
double integrate_test_function(const HPolytope& p, const std::string& name);

/// Average of a test function against the uniform probability measure on P.
double average_test_function(const HPolytope& p, const std::string& name);

struct W2ConvergenceRow {
    std::size_t index = 0;
    double d_w = 0;
    double d_w_error = 0;
    std::vector<double> discrepancy;  // |avg_phi(P_i) - avg_phi(Q)| per dictionary entry
    double max_discrepancy = 0;
};

struct W2ConvergenceReport {
    std::vector<std::string> functions;
    std::vector<W2ConvergenceRow> rows;
    double common_radius = 0;  // all bodies lie in the ball of this radius about the origin
};

W2ConvergenceReport w2_convergence_check(const std::vector<HPolytope>& sequence, const HPolytope& q,
                                         const WassersteinConfig& cfg = {});

}  // namespace toricgh
