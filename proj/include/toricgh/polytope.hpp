#pragma once

// Exact convex polytopes in H- and V-representation.
//
// Every HPolytope is bounded, full-dimensional and irredundant. Facet normals are
// primitive integer vectors (the constraint is scaled by the positive factor that
// clears denominators and content), so a facet reads
//
//     l_r(x) = <x, normal_r> - offset_r >= 0.
//
// Combinatorics (vertices, redundancy, faces, volumes, moments) are computed in exact
// rational arithmetic. Metric queries (diameter, point distance) use doubles.

#include "toricgh/rational.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace toricgh {

struct Halfspace {
    IVector normal;
    Rational offset;

    friend bool operator==(const Halfspace&, const Halfspace&) = default;
};

/// A half-space with rational normal, normalized on construction of an HPolytope.
struct RationalHalfspace {
    RVector normal;
    Rational offset;
};

class HPolytope {
public:
    /// Normalizes normals to primitive form, drops duplicates and redundant constraints
    /// (input order of the survivors is kept) and enumerates vertices.
    /// Throws Unbounded, Empty, Degenerate, InvalidInput.
    static HPolytope from_halfspaces(std::size_t dim, const std::vector<Halfspace>& constraints);
    static HPolytope from_halfspaces(std::size_t dim, const std::vector<RationalHalfspace>& constraints);

    /// Axis-aligned box [lo, hi]; facets x_k >= lo_k for all k first, then -x_k >= -hi_k.
    static HPolytope box(const RVector& lo, const RVector& hi);

    std::size_t dim() const { return dim_; }
    const std::vector<Halfspace>& facets() const { return facets_; }
    std::size_t facet_count() const { return facets_.size(); }

    /// Vertices in lexicographic order.
    const std::vector<RVector>& vertices() const { return vertices_; }

    /// Sorted indices of the facets tight at each vertex.
    const std::vector<std::vector<std::size_t>>& vertex_facets() const { return incidence_; }

    Rational slack(std::size_t facet, const RVector& x) const;
    bool contains(const RVector& x) const;

    /// Same point set: identical facet lists up to order.
    bool same_set(const HPolytope& other) const;

private:
    HPolytope() = default;

    std::size_t dim_ = 0;
    std::vector<Halfspace> facets_;
    std::vector<RVector> vertices_;
    std::vector<std::vector<std::size_t>> incidence_;
};

class VPolytope {
public:
    /// Keeps only the extreme points of the hull. Throws Degenerate if the hull is not full-dimensional.
    static VPolytope from_points(std::size_t dim, const std::vector<RVector>& points);

    std::size_t dim() const { return dim_; }
    const std::vector<RVector>& vertices() const { return vertices_; }

private:
    VPolytope() = default;

    std::size_t dim_ = 0;
    std::vector<RVector> vertices_;
};

struct Face {
    std::size_t dim = 0;
    std::vector<std::size_t> facets;    // facets containing the face
    std::vector<std::size_t> vertices;  // vertex indices into HPolytope::vertices()
};

/// All proper nonempty faces of a polytope, grouped by dimension.
class FaceLattice {
public:
    explicit FaceLattice(const HPolytope& p);

    const HPolytope& polytope() const { return polytope_; }
    const std::vector<Face>& faces(std::size_t k) const;

    /// Fan triangulation of a face from its lexicographically smallest vertex, recursing into
    /// the subfaces that avoid it. Each simplex lists f.dim + 1 vertex indices.
    std::vector<std::vector<std::size_t>> triangulate(const Face& f) const;
    std::vector<std::vector<std::size_t>> triangulate() const;

private:
    HPolytope polytope_;
    std::vector<std::vector<Face>> by_dim_;
};

VPolytope vertex_enumeration(const HPolytope& p);
HPolytope halfspace_reconstruction(const VPolytope& v);

/// Throws Empty when the intersection has empty interior, DimensionMismatch on dims.
HPolytope intersect(const HPolytope& p, const HPolytope& q);

Rational volume(const HPolytope& p);
Rational volume(const VPolytope& v);

struct Moments {
    Rational volume;
    RVector barycenter;
    std::vector<RVector> covariance;  // (1/|P|) * integral of (x-b)(x-b)^T
    Rational variance;                // trace of covariance
};

Moments moments(const HPolytope& p);

/// Raw integrals over P of 1, x and x x^T (exact).
struct RawMoments {
    Rational mass;
    RVector first;
    std::vector<RVector> second;
};
RawMoments raw_moments(const HPolytope& p);

double diameter(const HPolytope& p);

/// Euclidean distance from x to P; 0 when every l_r(x) >= -1e-12.
double point_distance(std::span<const double> x, const HPolytope& p);

/// Throws BadK unless k < dim.
std::vector<Face> faces(const HPolytope& p, std::size_t k);

HPolytope translate(const HPolytope& p, const RVector& t);
HPolytope scale(const HPolytope& p, const Rational& factor);

/// Floating-point projection onto a fixed polytope, reusable across many queries.
class NearestPointSolver {
public:
    explicit NearestPointSolver(const HPolytope& p);

    Eigen::VectorXd nearest(const Eigen::VectorXd& x) const;
    double distance(const Eigen::VectorXd& x) const;

private:
    struct AffinePiece {
        Eigen::VectorXd origin;
        Eigen::MatrixXd basis;  // orthonormal columns spanning the face directions
    };

    bool inside(const Eigen::VectorXd& x, double tol) const;

    Eigen::MatrixXd normals_;
    Eigen::VectorXd offsets_;
    std::vector<AffinePiece> pieces_;
};

Eigen::VectorXd to_eigen(const RVector& v);
Eigen::VectorXd to_eigen(std::span<const double> v);

}  // namespace toricgh
