#pragma once

// Converging families of Delzant polytopes and the per-step report behind `experiment`:
//
//     pentagon   P_{2^-i}                        -> [0,2] x [0,1]
//     dilation   (1 + 2^-i) [0,1]^2              -> [0,1]^2
//     rectangle  [0,2] x [0, 1 + 1/i]            -> [0,2] x [0,1]

#include "toricgh/distances.hpp"
#include "toricgh/gh.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace toricgh {

struct Family {
    std::string name;
    std::vector<HPolytope> members;  // i = 1 .. steps
    std::vector<Rational> parameter;
    HPolytope limit = HPolytope::box({0}, {1});
};

/// Throws BadConfig for an unknown family or zero steps.
Family make_family(const std::string& name, std::size_t steps);

struct ExperimentConfig {
    std::string family = "pentagon";
    std::size_t steps = 5;
    Rational h{1, 10};
    Rational delta{1, 10};
    int torus_res = 8;
    std::uint64_t seed = 0;
    double ball_radius = 10;  // every member must lie in this ball about the origin
    WassersteinConfig wasserstein;
    std::size_t max_pairs = 1000000;
    bool exhaustive = false;
};

struct ExperimentRow {
    std::size_t i = 0;
    Rational parameter;
    double d_h = 0;
    Rational d_v;
    double d_w = 0;
    double d_w_error = 0;
    std::size_t facet_count = 0;
    MapKind map = MapKind::Greedy;
    DistortionReport distortion;
    GHBounds gh;
    std::size_t fp_count = 0;
    double fp_gap = 0;
    double reconstruct_gap = 0;
    double reconstruct_outside = 0;
    Rational mass;
    std::vector<double> fiber_gap;  // one per dictionary function
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<std::string> functions;
    std::vector<ExperimentRow> rows;
    double grid_scale = 0;  // of the limit sample
    std::size_t limit_vertices = 0;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Versioned CSV: a "# schema" comment, a "# phi" comment naming the test functions, a header row.
void write_csv(std::ostream& out, const ExperimentReport& report);

}  // namespace toricgh
