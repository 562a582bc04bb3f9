#pragma once

// Numerical signatures of equivariant Gromov-Hausdorff convergence of toric manifolds M_{P_i} -> M_P:
// face matching, stability of primitive normals, approximation maps between samples and their
// distortions, fixed-point tracking, and the moment-map reconstruction F_i = mu o f_i o S_i.

#include "toricgh/delzant.hpp"
#include "toricgh/manifold_sample.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace toricgh {

struct FacePair {
    std::size_t source = 0;  // index into faces(P_i, k)
    std::size_t target = 0;  // index into faces(P, k)
    double gap = 0;          // symmetric Hausdorff distance of the two faces
    double measure = 0;      // k-dimensional Hausdorff measure of the source face
    bool essential = false;
};

struct FacetData {
    IVector source_normal, target_normal;
    Rational source_offset, target_offset;
};

struct FaceMatch {
    std::size_t k = 0;
    std::vector<FacePair> matched;  // ascending gap
    std::vector<std::size_t> unmatched_source, unmatched_target;
    std::vector<FacetData> facets;  // k = n-1 only, one per matched pair
    std::size_t source_faces = 0, target_faces = 0;
    bool within_tolerance = false;  // every matched gap below the tolerance
    bool count_inequality = false;  // #k-faces(P) <= #k-faces(P_i)
};

/// Greedy one-to-one matching of k-faces by Hausdorff gap. A pair is essential when its gap is
/// within `tolerance` and the source face has H^k >= essential_fraction * Diam(P)^k.
FaceMatch face_convergence_report(const HPolytope& pi, const HPolytope& p, std::size_t k, double tolerance,
                                  double essential_fraction = 1e-3);

struct NormalTrack {
    std::size_t facet = 0;                  // facet of the limit P
    std::vector<IVector> normals;           // matched primitive normal of each P_i
    std::vector<Rational> offsets;          // matched offset of each P_i
    bool eventually_constant = false;       // identical normals over the last half of the sequence
};

struct NormalStability {
    std::vector<NormalTrack> tracks;
    std::vector<std::size_t> facet_counts;  // per P_i
    std::size_t limit_facets = 0;
    bool facet_count_mismatch = false;      // the last P_i has a different facet count than P
    bool stable = false;                    // every track eventually constant and counts agree
};

NormalStability normal_stability(const std::vector<HPolytope>& sequence, const HPolytope& p);

enum class MapKind { ChartAffine, Greedy, Custom };

std::string to_string(MapKind k);

/// Automorphism of the shift group (Z/m)^n, stored as an integer matrix acting on step vectors.
struct GroupAutomorphism {
    IMatrix matrix;

    static GroupAutomorphism identity(std::size_t n);
    static GroupAutomorphism inversion(std::size_t n);
};

struct ApproxMap {
    const ToricManifoldSample* source = nullptr;
    const ToricManifoldSample* target = nullptr;
    std::vector<std::size_t> assignment;  // source node -> target node
    GroupAutomorphism rho;
    MapKind kind = MapKind::Custom;
};

/// Chart-affine map: facet coordinates l^(r) / width^(r) are carried over by least squares, the base
/// point is snapped to the nearest target base node, fiber indices are kept and vertex nodes go to
/// the matching vertex nodes. Throws NormalFanMismatch unless both polytopes share their normal fan.
ApproxMap build_approx_map(const ToricManifoldSample& source, const ToricManifoldSample& target);

/// Nearest moment value at the same fiber index; no fan assumption.
ApproxMap build_greedy_map(const ToricManifoldSample& source, const ToricManifoldSample& target);

ApproxMap identity_map(const ToricManifoldSample& s);

struct DistortionOptions {
    std::size_t max_pairs = 1000000;
    bool exhaustive = false;
    std::uint64_t seed = 0;
};

struct DistortionReport {
    double eps_iso = 0;
    double eps_surj = 0;
    double eps_equiv = 0;
    double eps = 0;
    std::size_t pairs = 0;
    bool exhaustive = false;  // false: eps_iso is a lower bound from sampled pairs
};

DistortionReport eqgh_distortion(const ApproxMap& f, const DistortionOptions& opt = {});

struct GHBounds {
    double lower = 0;
    double upper = 0;
    MapKind upper_map = MapKind::Greedy;
};

GHBounds gh_bounds(const ToricManifoldSample& x, const ToricManifoldSample& y, const DistortionOptions& opt = {});

struct FixedPointStep {
    std::size_t proxies = 0;
    double gap = 0;  // max distance from an image proxy to the limit's vertex nodes
    bool count_ok = false;
};

struct FixedPointReport {
    std::vector<FixedPointStep> steps;
    std::size_t limit_vertices = 0;
    bool count_inequality = false;  // every step has at least as many proxies as P has vertices
};

/// Nodes whose shift-orbit diameter is below 2 * fiber_resolution.
std::vector<std::size_t> fixed_point_proxies(const ToricManifoldSample& s);

FixedPointReport fixed_point_tracking(const std::vector<const ToricManifoldSample*>& family,
                                      const ToricManifoldSample& limit, const std::vector<ApproxMap>& maps);

struct Reconstruction {
    std::vector<Eigen::VectorXd> cloud;
    double gap = 0;        // Hausdorff distance between the cloud and P
    double outside = 0;    // max distance from a cloud point to P
};

/// Section S_i at fiber zero over every base node and vertex of P_i, pushed through f_i and mu.
Reconstruction reconstruct_polytope(const ApproxMap& f);

struct FiberAverage {
    std::string function;
    double integral = 0;         // int_{P_i} phi_i
    double target = 0;           // int_P phi
    double gap = 0;
    double section_gap = 0;      // |int phi_i - int phi o F_i| / |P_i|
    Rational mass;               // sum of cell weights, exactly |P_i|
};

FiberAverage fiber_average(const std::string& function, const ApproxMap& f);

}  // namespace toricgh
