#pragma once

// Finite metric-measure sample of a symplectic toric manifold M_P with its Guillemin metric.
//
// Base nodes sit over the grid cells [k h, (k+1) h] meeting P: the clipped-cell centroid projected
// onto the lattice inset P_delta = {l_r >= delta}. Each base node carries m^n fiber nodes
// y in (Z/m)^n / m. Every vertex of P adds one node, the torus-fixed point over it, joined to the
// nearby base nodes by the singular radial integral. Node measure is the exact clipped cell volume
// divided by m^n (vertex nodes carry none), so the measure pushes forward to Lebesgue on P.

#include "toricgh/guillemin.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace toricgh {

struct SampleConfig {
    Rational h{1, 10};
    Rational delta{1, 10};
    int torus_res = 8;
    std::uint64_t seed = 0;          // recorded for provenance; construction is deterministic
    std::size_t max_nodes = 250000;
};

class ToricManifoldSample {
public:
    /// Throws BadConfig for invalid h, delta, resolution or an empty inset; TooLarge above max_nodes.
    static ToricManifoldSample build(const GuilleminChart& chart, const SampleConfig& cfg);

    std::size_t dim() const { return dim_; }
    int torus_res() const { return m_; }
    const HPolytope& polytope() const { return polytope_; }
    const SampleConfig& config() const { return cfg_; }

    std::size_t base_count() const { return base_points_.size(); }
    std::size_t fiber_count() const { return fiber_count_; }
    std::size_t vertex_count() const { return vertex_points_.size(); }
    std::size_t node_count() const { return base_count() * fiber_count_ + vertex_count(); }

    std::size_t node(std::size_t base, std::size_t fiber) const { return base * fiber_count_ + fiber; }
    std::size_t vertex_node(std::size_t v) const { return base_count() * fiber_count_ + v; }
    bool is_vertex(std::size_t node) const { return node >= base_count() * fiber_count_; }
    std::size_t base_of(std::size_t node) const { return node / fiber_count_; }
    std::size_t fiber_of(std::size_t node) const { return node % fiber_count_; }
    std::size_t vertex_of(std::size_t node) const { return node - base_count() * fiber_count_; }

    /// Moment map value mu(node).
    const Eigen::VectorXd& moment(std::size_t node) const;
    /// Fiber coordinate in [0,1)^n; zero for vertex nodes.
    Eigen::VectorXd fiber_coordinates(std::size_t node) const;
    std::vector<int> fiber_index(std::size_t fiber) const;
    std::size_t fiber_linear(const std::vector<int>& index) const;

    const std::vector<Eigen::VectorXd>& base_points() const { return base_points_; }
    const std::vector<std::vector<long>>& base_cells() const { return base_cells_; }
    /// Centroids of the clipped cells before projection onto the inset.
    const std::vector<Eigen::VectorXd>& base_centroids() const { return base_centroids_; }
    const std::vector<Rational>& base_measure() const { return base_measure_; }
    const std::vector<Eigen::VectorXd>& vertex_points() const { return vertex_points_; }

    double measure(std::size_t node) const;
    Rational total_measure() const;

    /// Generator k of the shift group (Z/m)^n applied `steps` times.
    std::size_t shift(std::size_t node, std::size_t generator, int steps = 1) const;

    /// Shortest-path distance; symmetric and exactly invariant under shifts.
    double distance(std::size_t a, std::size_t b) const;
    double diameter() const;
    /// Two nodes realising the diameter.
    std::pair<std::size_t, std::size_t> diameter_pair() const { return diameter_pair_; }
    /// Largest edge weight between non-vertex nodes.
    double grid_scale() const { return grid_scale_; }
    /// (1/m) max over base nodes of sqrt(lambda_max(G^{-1})): the longest single fiber step.
    double fiber_resolution() const { return fiber_resolution_; }

    // CSR adjacency.
    const std::vector<std::uint64_t>& offsets() const { return offsets_; }
    const std::vector<std::uint32_t>& targets() const { return targets_; }
    const std::vector<double>& weights() const { return weights_; }

    void write(std::ostream& out) const;
    static ToricManifoldSample read(std::istream& in);

private:
    void compute_distances();

    std::size_t dim_ = 0;
    int m_ = 0;
    std::size_t fiber_count_ = 0;
    HPolytope polytope_ = HPolytope::box({0}, {1});
    SampleConfig cfg_;
    std::vector<Eigen::VectorXd> base_points_;
    std::vector<std::vector<long>> base_cells_;
    std::vector<Eigen::VectorXd> base_centroids_;
    std::vector<Rational> base_measure_;
    std::vector<Eigen::VectorXd> vertex_points_;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint32_t> targets_;
    std::vector<double> weights_;
    double grid_scale_ = 0;
    double fiber_resolution_ = 0;
    // rows_[b] from node (b, 0); rows_[base_count + v] from vertex node v.
    std::vector<std::vector<double>> rows_;
    double diameter_ = 0;
    std::pair<std::size_t, std::size_t> diameter_pair_{0, 0};
};

/// Dijkstra from several sources at distance zero.
std::vector<double> multi_source_distances(const ToricManifoldSample& s, const std::vector<std::size_t>& sources);

}  // namespace toricgh
