#pragma once

// Delzant verification, the action of AGL(n, Z), kernel-torus data and moduli-space estimates.

#include "toricgh/exact_linalg.hpp"
#include "toricgh/polytope.hpp"

#include <optional>
#include <vector>

namespace toricgh {

struct VertexCertificate {
    RVector vertex;
    IMatrix edge_dirs;  // primitive edge directions, one per row, ordered by the far endpoint
    Integer det = 0;    // 0 when the vertex is not simple
    bool simple = false;
    bool rational = false;
    bool smooth = false;
};

struct DelzantReport {
    std::vector<VertexCertificate> vertices;  // same order as HPolytope::vertices()
    bool pass = false;
};

DelzantReport is_delzant(const HPolytope& p);

/// An HPolytope that passed is_delzant.
class DelzantPolytope {
public:
    /// Throws NotDelzant with the first failing vertex in the message.
    static DelzantPolytope from(HPolytope p);

    const HPolytope& base() const { return base_; }
    const DelzantReport& report() const { return report_; }

private:
    DelzantPolytope(HPolytope p, DelzantReport r) : base_(std::move(p)), report_(std::move(r)) {}

    HPolytope base_;
    DelzantReport report_;
};

/// x -> A x + t with A in GL(n, Z).
class UnimodularAffineMap {
public:
    /// Throws InvalidInput unless |det A| = 1, DimensionMismatch on shapes.
    UnimodularAffineMap(IMatrix a, RVector t);

    static UnimodularAffineMap identity(std::size_t n);
    static UnimodularAffineMap translation(RVector t);

    const IMatrix& linear() const { return a_; }
    const RVector& shift() const { return t_; }
    std::size_t dim() const { return t_.size(); }

    RVector operator()(const RVector& x) const;

    /// (A1, t1) * (A2, t2) = (A1 A2, A1 t2 + t1): apply the right factor first.
    friend UnimodularAffineMap operator*(const UnimodularAffineMap& g, const UnimodularAffineMap& h);
    UnimodularAffineMap inverse() const;

    friend bool operator==(const UnimodularAffineMap&, const UnimodularAffineMap&) = default;

private:
    IMatrix a_;
    RVector t_;
};

/// Image g(P). Facet order follows P.
HPolytope apply_map(const HPolytope& p, const UnimodularAffineMap& g);

struct ConstructionData {
    std::size_t facet_count = 0;
    IMatrix projection;    // n x N, column r is the r-th primitive normal
    RVector offsets;       // lambda, facet order
    IMatrix kernel_basis;  // (N - n) rows spanning ker(projection) over Z, Hermite normal form
};

ConstructionData construction_data(const DelzantPolytope& p);

struct MinVarianceResult {
    std::vector<HPolytope> minimizers;            // distinct centred images, lexicographic order of A
    std::vector<UnimodularAffineMap> maps;        // one map per minimizer
    Rational variance;
    bool boundary_hit = false;                    // some minimizing A has an entry equal to the bound
};

/// Throws BadBound for bound < 1 and TooLarge when (2B+1)^(n^2) exceeds the enumeration budget.
MinVarianceResult min_variance_representatives(const HPolytope& p, int bound);

/// All A with entries in [-bound, bound] and |det A| = 1, in lexicographic row-major order.
std::vector<IMatrix> unimodular_matrices(std::size_t n, int bound);

struct ModuliEstimate {
    double value = 0;
    UnimodularAffineMap map;
};

/// Upper bound on the moduli distance between the AGL(n,Z)-orbits of P and Q. Throws BadBound.
ModuliEstimate moduli_distance_estimate(const HPolytope& p, const HPolytope& q, int bound);
double moduli_distance_upper(const HPolytope& p, const HPolytope& q, int bound);

}  // namespace toricgh
