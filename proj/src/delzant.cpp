#include "toricgh/delzant.hpp"

#include "toricgh/distances.hpp"
#include "toricgh/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace toricgh {

namespace {

// For each vertex, the sorted indices of the vertices joined to it by an edge.
std::vector<std::vector<std::size_t>> edge_neighbours(const HPolytope& p) {
    std::vector<std::vector<std::size_t>> nb(p.vertices().size());
    if (p.dim() == 1) {
        nb[0] = {1};
        nb[1] = {0};
        return nb;
    }
    const FaceLattice lattice(p);
    for (const auto& e : lattice.faces(1)) {
        nb[e.vertices[0]].push_back(e.vertices[1]);
        nb[e.vertices[1]].push_back(e.vertices[0]);
    }
    for (auto& n : nb) std::sort(n.begin(), n.end());
    return nb;
}

IMatrix to_imatrix_checked(const IMatrix& a, std::size_t n) {
    if (a.size() != n) fail(ErrorKind::DimensionMismatch, "matrix has wrong number of rows");
    for (const auto& row : a)
        if (row.size() != n) fail(ErrorKind::DimensionMismatch, "matrix is not square");
    return a;
}

RVector apply_linear(const IMatrix& a, const RVector& x) {
    RVector y(a.size(), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) y[i] = dot(a[i], x);
    return y;
}

Rational conjugated_trace(const IMatrix& a, const std::vector<RVector>& cov) {
    // trace(A S A^T) = sum_i a_i^T S a_i
    Rational tr = 0;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t l = 0; l < n; ++l) tr += Rational(a[i][k] * a[i][l]) * cov[k][l];
        }
    return tr;
}

void check_bound(int bound) {
    if (bound < 1) fail(ErrorKind::BadBound, "search bound must be at least 1");
}

long max_abs_entry(const IMatrix& a) {
    long m = 0;
    for (const auto& row : a)
        for (const auto& e : row) m = std::max(m, boost::multiprecision::abs(e).convert_to<long>());
    return m;
}

}  // namespace

DelzantReport is_delzant(const HPolytope& p) {
    const std::size_t n = p.dim();
    const auto& verts = p.vertices();
    const auto nb = edge_neighbours(p);
    DelzantReport report;
    report.pass = true;
    for (std::size_t v = 0; v < verts.size(); ++v) {
        VertexCertificate c;
        c.vertex = verts[v];
        c.rational = true;
        for (auto w : nb[v]) {
            RVector d(n);
            for (std::size_t k = 0; k < n; ++k) d[k] = verts[w][k] - verts[v][k];
            c.edge_dirs.push_back(primitive_integer_vector(d));
        }
        c.simple = nb[v].size() == n && p.vertex_facets()[v].size() == n;
        if (c.simple) {
            c.det = determinant(c.edge_dirs);
            c.smooth = c.det == 1 || c.det == -1;
        }
        report.pass = report.pass && c.simple && c.rational && c.smooth;
        report.vertices.push_back(std::move(c));
    }
    return report;
}

DelzantPolytope DelzantPolytope::from(HPolytope p) {
    DelzantReport r = is_delzant(p);
    if (!r.pass) {
        for (const auto& c : r.vertices) {
            if (c.simple && c.smooth) continue;
            std::ostringstream msg;
            msg << "vertex (";
            for (std::size_t k = 0; k < c.vertex.size(); ++k) msg << (k ? "," : "") << to_string(c.vertex[k]);
            msg << ") is " << (c.simple ? "not smooth, det " + c.det.str() : std::string("not simple"));
            fail(ErrorKind::NotDelzant, msg.str());
        }
    }
    return DelzantPolytope(std::move(p), std::move(r));
}

UnimodularAffineMap::UnimodularAffineMap(IMatrix a, RVector t) : a_(to_imatrix_checked(a, t.size())), t_(std::move(t)) {
    const Integer det = determinant(a_);
    if (det != 1 && det != -1) fail(ErrorKind::InvalidInput, "linear part must have determinant +-1");
}

UnimodularAffineMap UnimodularAffineMap::identity(std::size_t n) {
    return UnimodularAffineMap(identity_matrix(n), RVector(n, Rational(0)));
}

UnimodularAffineMap UnimodularAffineMap::translation(RVector t) {
    const std::size_t n = t.size();
    return UnimodularAffineMap(identity_matrix(n), std::move(t));
}

RVector UnimodularAffineMap::operator()(const RVector& x) const {
    if (x.size() != dim()) fail(ErrorKind::DimensionMismatch, "point has wrong length");
    RVector y = apply_linear(a_, x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += t_[i];
    return y;
}

UnimodularAffineMap operator*(const UnimodularAffineMap& g, const UnimodularAffineMap& h) {
    if (g.dim() != h.dim()) fail(ErrorKind::DimensionMismatch, "composing maps of different dimension");
    RVector t = apply_linear(g.a_, h.t_);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += g.t_[i];
    return UnimodularAffineMap(multiply(g.a_, h.a_), std::move(t));
}

UnimodularAffineMap UnimodularAffineMap::inverse() const {
    IMatrix inv = unimodular_inverse(a_);
    RVector t = apply_linear(inv, t_);
    for (auto& e : t) e = -e;
    return UnimodularAffineMap(std::move(inv), std::move(t));
}

HPolytope apply_map(const HPolytope& p, const UnimodularAffineMap& g) {
    if (p.dim() != g.dim()) fail(ErrorKind::DimensionMismatch, "map and polytope differ in dimension");
    const IMatrix inv_t = transpose(unimodular_inverse(g.linear()));
    std::vector<Halfspace> hs;
    hs.reserve(p.facet_count());
    for (const auto& h : p.facets()) {
        IVector normal(p.dim());
        for (std::size_t i = 0; i < p.dim(); ++i) {
            normal[i] = 0;
            for (std::size_t k = 0; k < p.dim(); ++k) normal[i] += inv_t[i][k] * h.normal[k];
        }
        const Rational offset = h.offset + dot(normal, g.shift());
        hs.push_back({std::move(normal), offset});
    }
    return HPolytope::from_halfspaces(p.dim(), hs);
}

ConstructionData construction_data(const DelzantPolytope& dp) {
    const HPolytope& p = dp.base();
    const std::size_t n = p.dim();
    const std::size_t big_n = p.facet_count();
    ConstructionData c;
    c.facet_count = big_n;
    c.projection.assign(n, IVector(big_n));
    for (std::size_t r = 0; r < big_n; ++r) {
        for (std::size_t k = 0; k < n; ++k) c.projection[k][r] = p.facets()[r].normal[k];
        c.offsets.push_back(p.facets()[r].offset);
    }
    const SmithForm s = smith_normal_form(c.projection);
    IMatrix kernel;
    for (std::size_t j = s.divisors.size(); j < big_n; ++j) {
        IVector col(big_n);
        for (std::size_t i = 0; i < big_n; ++i) col[i] = s.v[i][j];
        kernel.push_back(std::move(col));
    }
    c.kernel_basis = hermite_normal_form(std::move(kernel));
    return c;
}

std::vector<IMatrix> unimodular_matrices(std::size_t n, int bound) {
    check_bound(bound);
    const std::size_t cells = n * n;
    const double count = std::pow(2.0 * bound + 1.0, static_cast<double>(cells));
    if (count > 5e7) fail(ErrorKind::TooLarge, "GL(n,Z) enumeration exceeds 5e7 candidates");
    std::vector<long> entries(cells, -bound);
    std::vector<IMatrix> out;
    Eigen::MatrixXd m(n, n);
    for (;;) {
        for (std::size_t i = 0; i < cells; ++i) m(i / n, i % n) = static_cast<double>(entries[i]);
        const double det = m.determinant();
        if (std::abs(std::abs(det) - 1.0) < 0.5) {
            IMatrix a(n, IVector(n));
            for (std::size_t i = 0; i < cells; ++i) a[i / n][i % n] = entries[i];
            const Integer exact = determinant(a);
            if (exact == 1 || exact == -1) out.push_back(std::move(a));
        }
        std::size_t i = cells;
        while (i > 0 && entries[i - 1] == bound) entries[--i] = -bound;
        if (i == 0) break;
        ++entries[i - 1];
    }
    return out;
}

MinVarianceResult min_variance_representatives(const HPolytope& p, int bound) {
    check_bound(bound);
    const std::size_t n = p.dim();
    const Moments mom = moments(p);
    Eigen::MatrixXd cov(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) cov(a, b) = to_double(mom.covariance[a][b]);

    const auto candidates = unimodular_matrices(n, bound);
    std::vector<double> approx(candidates.size());
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        Eigen::MatrixXd a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) a(i, k) = candidates[c][i][k].convert_to<double>();
        approx[c] = (a * cov * a.transpose()).trace();
        lo = std::min(lo, approx[c]);
    }

    MinVarianceResult res;
    std::vector<std::size_t> best;
    bool have = false;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (approx[c] > lo * (1 + 1e-9) + 1e-300) continue;
        const Rational v = conjugated_trace(candidates[c], mom.covariance);
        if (!have || v < res.variance) {
            res.variance = v;
            best.clear();
            have = true;
        }
        if (v == res.variance) best.push_back(c);
    }
    for (auto c : best) {
        const IMatrix& a = candidates[c];
        if (max_abs_entry(a) >= bound) res.boundary_hit = true;
        RVector t = apply_linear(a, mom.barycenter);
        for (auto& e : t) e = -e;
        UnimodularAffineMap g(a, std::move(t));
        HPolytope image = apply_map(p, g);
        bool seen = false;
        for (const auto& m : res.minimizers) seen = seen || m.same_set(image);
        if (seen) continue;
        res.minimizers.push_back(std::move(image));
        res.maps.push_back(std::move(g));
    }
    return res;
}

namespace {

double dv(const HPolytope& p, const UnimodularAffineMap& g, const HPolytope& q) {
    return to_double(d_volume(apply_map(p, g), q));
}

// Coordinate descent on the translation with dyadic steps, halving down to 1e-9.
ModuliEstimate refine_translation(const HPolytope& p, const HPolytope& q, const IMatrix& a, RVector t, double step0) {
    const std::size_t n = p.dim();
    ModuliEstimate best{dv(p, UnimodularAffineMap(a, t), q), UnimodularAffineMap(a, t)};
    Rational step = 1;
    while (to_double(step) > step0) step /= 2;
    while (to_double(step) < step0 / 2) step *= 2;
    while (to_double(step) >= 1e-9 && best.value > 0) {
        bool improved = false;
        for (std::size_t k = 0; k < n; ++k) {
            for (int sign : {1, -1}) {
                RVector trial = best.map.shift();
                trial[k] += sign * step;
                UnimodularAffineMap g(a, trial);
                const double v = dv(p, g, q);
                if (v < best.value) {
                    best = {v, std::move(g)};
                    improved = true;
                }
            }
        }
        if (!improved) step /= 2;
    }
    return best;
}

}  // namespace

ModuliEstimate moduli_distance_estimate(const HPolytope& p, const HPolytope& q, int bound) {
    check_bound(bound);
    if (p.dim() != q.dim()) fail(ErrorKind::DimensionMismatch, "polytopes differ in dimension");
    const std::size_t n = p.dim();
    const Moments mp = moments(p);
    const Moments mq = moments(q);
    const double step0 = std::max(diameter(q), 1e-6) / 4;

    ModuliEstimate best{to_double(d_volume(p, q)), UnimodularAffineMap::identity(n)};
    if (best.value == 0) return best;

    constexpr std::size_t refine_per_level = 4;
    std::map<IMatrix, bool> refined;
    // Refinement is a deterministic function of A, and the refined set grows with the bound,
    // so the estimate is monotone in the bound.
    for (int b = 1; b <= bound; ++b) {
        std::vector<std::pair<double, std::size_t>> seeds;
        const auto candidates = unimodular_matrices(n, b);
        std::vector<RVector> shifts;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            RVector t = apply_linear(candidates[c], mp.barycenter);
            for (std::size_t k = 0; k < n; ++k) t[k] = mq.barycenter[k] - t[k];
            seeds.emplace_back(dv(p, UnimodularAffineMap(candidates[c], t), q), c);
            shifts.push_back(std::move(t));
        }
        std::stable_sort(seeds.begin(), seeds.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [seed_value, c] : seeds) {
            if (seed_value < best.value) best = {seed_value, UnimodularAffineMap(candidates[c], shifts[c])};
        }
        std::size_t taken = 0;
        for (const auto& [seed_value, c] : seeds) {
            if (taken == refine_per_level) break;
            ++taken;
            if (refined.count(candidates[c])) continue;
            refined[candidates[c]] = true;
            ModuliEstimate r = refine_translation(p, q, candidates[c], shifts[c], step0);
            if (r.value < best.value) best = std::move(r);
        }
    }
    return best;
}

double moduli_distance_upper(const HPolytope& p, const HPolytope& q, int bound) {
    return moduli_distance_estimate(p, q, bound).value;
}

}  // namespace toricgh
