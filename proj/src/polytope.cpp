#include "toricgh/polytope.hpp"

#include "combinatorics.hpp"
#include "toricgh/error.hpp"
#include "toricgh/exact_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace toricgh {

namespace {

using detail::for_each_combination;

Halfspace normalize(const RationalHalfspace& h) {
    bool zero = std::all_of(h.normal.begin(), h.normal.end(), [](const Rational& q) { return q == 0; });
    if (zero) fail(ErrorKind::InvalidInput, "half-space with zero normal");
    Rational s;
    IVector normal = primitive_integer_vector(h.normal, &s);
    return {std::move(normal), h.offset * s};
}

RMatrix normal_rows(const std::vector<Halfspace>& hs, const std::vector<std::size_t>& which) {
    RMatrix rows;
    rows.reserve(which.size());
    for (auto i : which) rows.push_back(to_rational(hs[i].normal));
    return rows;
}

bool recession_cone_trivial(std::size_t dim, const std::vector<Halfspace>& hs) {
    std::vector<std::size_t> all(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) all[i] = i;
    if (rank(normal_rows(hs, all)) < dim) return false;
    // A pointed cone {d : N d >= 0} is nontrivial iff it has an extreme ray, which lies
    // on dim-1 independent tight constraints.
    bool trivial = true;
    for_each_combination(hs.size(), dim - 1, [&](const std::vector<std::size_t>& subset) {
        RMatrix rows = normal_rows(hs, subset);
        if (rank(rows) != dim - 1) return true;
        const auto ns = nullspace(rows, dim);
        const RVector& d = ns.front();
        for (int sign : {1, -1}) {
            bool ok = true;
            for (const auto& h : hs) {
                if (sign * dot(h.normal, d) < 0) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                trivial = false;
                return false;
            }
        }
        return true;
    });
    return trivial;
}

std::vector<RVector> enumerate_vertices(std::size_t dim, const std::vector<Halfspace>& hs) {
    std::set<RVector> found;
    for_each_combination(hs.size(), dim, [&](const std::vector<std::size_t>& subset) {
        RMatrix a = normal_rows(hs, subset);
        RVector b;
        b.reserve(dim);
        for (auto i : subset) b.push_back(hs[i].offset);
        auto x = solve(std::move(a), std::move(b));
        if (!x) return true;
        for (const auto& h : hs)
            if (dot(h.normal, *x) < h.offset) return true;
        found.insert(std::move(*x));
        return true;
    });
    return {found.begin(), found.end()};
}

// Irredundant supporting hyperplanes of the hull of distinct points (inward normals).
std::vector<Halfspace> hull_facets(std::size_t dim, const std::vector<RVector>& pts) {
    if (affine_dimension(pts) < static_cast<int>(dim))
        fail(ErrorKind::Degenerate, "points do not span a full-dimensional hull");
    std::set<std::pair<IVector, Rational>> found;
    for_each_combination(pts.size(), dim, [&](const std::vector<std::size_t>& subset) {
        RMatrix diffs;
        for (std::size_t j = 1; j < subset.size(); ++j) {
            RVector d(dim);
            for (std::size_t k = 0; k < dim; ++k) d[k] = pts[subset[j]][k] - pts[subset[0]][k];
            diffs.push_back(std::move(d));
        }
        if (rank(diffs) != dim - 1) return true;
        const auto ns = nullspace(diffs, dim);
        IVector normal = primitive_integer_vector(ns.front());
        Rational offset = dot(normal, pts[subset[0]]);
        bool pos = false, neg = false;
        for (const auto& p : pts) {
            const Rational s = dot(normal, p) - offset;
            if (s > 0) pos = true;
            if (s < 0) neg = true;
            if (pos && neg) return true;
        }
        if (neg) {
            for (auto& e : normal) e = -e;
            offset = -offset;
        }
        found.emplace(std::move(normal), std::move(offset));
        return true;
    });
    std::vector<Halfspace> out;
    out.reserve(found.size());
    for (const auto& [n, o] : found) out.push_back({n, o});
    return out;
}

std::vector<RVector> dedupe_points(std::vector<RVector> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

Integer factorial(std::size_t n) {
    Integer f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<unsigned long>(i);
    return f;
}

Rational simplex_volume(const std::vector<RVector>& verts, const std::vector<std::size_t>& simplex) {
    const std::size_t n = simplex.size() - 1;
    RMatrix m(n, RVector(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) m[i][k] = verts[simplex[i + 1]][k] - verts[simplex[0]][k];
    Rational det = determinant(std::move(m));
    if (det < 0) det = -det;
    return det / Rational(factorial(n));
}

}  // namespace

HPolytope HPolytope::from_halfspaces(std::size_t dim, const std::vector<RationalHalfspace>& constraints) {
    std::vector<Halfspace> normalized;
    normalized.reserve(constraints.size());
    for (const auto& c : constraints) {
        if (c.normal.size() != dim) fail(ErrorKind::DimensionMismatch, "half-space normal has wrong length");
        normalized.push_back(normalize(c));
    }
    return from_halfspaces(dim, normalized);
}

HPolytope HPolytope::from_halfspaces(std::size_t dim, const std::vector<Halfspace>& constraints) {
    if (dim == 0) fail(ErrorKind::InvalidInput, "dimension must be positive");
    std::vector<Halfspace> hs;
    for (const auto& c : constraints) {
        if (c.normal.size() != dim) fail(ErrorKind::DimensionMismatch, "half-space normal has wrong length");
        Halfspace h = normalize({to_rational(c.normal), c.offset});
        if (std::find(hs.begin(), hs.end(), h) == hs.end()) hs.push_back(std::move(h));
    }
    if (hs.size() < dim + 1) fail(ErrorKind::Unbounded, "fewer than dim+1 half-spaces");
    if (!recession_cone_trivial(dim, hs)) fail(ErrorKind::Unbounded, "recession cone is nontrivial");

    std::vector<RVector> verts = enumerate_vertices(dim, hs);
    if (verts.empty()) fail(ErrorKind::Empty, "half-space system is infeasible");
    if (affine_dimension(verts) < static_cast<int>(dim)) fail(ErrorKind::Degenerate, "polytope is not full-dimensional");

    HPolytope p;
    p.dim_ = dim;
    for (const auto& h : hs) {
        std::vector<RVector> tight;
        for (const auto& v : verts)
            if (dot(h.normal, v) == h.offset) tight.push_back(v);
        if (affine_dimension(tight) == static_cast<int>(dim) - 1) p.facets_.push_back(h);
    }
    p.vertices_ = std::move(verts);
    p.incidence_.resize(p.vertices_.size());
    for (std::size_t v = 0; v < p.vertices_.size(); ++v)
        for (std::size_t r = 0; r < p.facets_.size(); ++r)
            if (p.slack(r, p.vertices_[v]) == 0) p.incidence_[v].push_back(r);
    return p;
}

HPolytope HPolytope::box(const RVector& lo, const RVector& hi) {
    if (lo.size() != hi.size()) fail(ErrorKind::DimensionMismatch, "box corners differ in dimension");
    const std::size_t n = lo.size();
    std::vector<Halfspace> hs;
    for (std::size_t k = 0; k < n; ++k) {
        IVector e(n, Integer(0));
        e[k] = 1;
        hs.push_back({e, lo[k]});
    }
    for (std::size_t k = 0; k < n; ++k) {
        IVector e(n, Integer(0));
        e[k] = -1;
        hs.push_back({e, -hi[k]});
    }
    return from_halfspaces(n, hs);
}

Rational HPolytope::slack(std::size_t facet, const RVector& x) const {
    return dot(facets_[facet].normal, x) - facets_[facet].offset;
}

bool HPolytope::contains(const RVector& x) const {
    for (std::size_t r = 0; r < facets_.size(); ++r)
        if (slack(r, x) < 0) return false;
    return true;
}

bool HPolytope::same_set(const HPolytope& other) const {
    if (dim_ != other.dim_ || facets_.size() != other.facets_.size()) return false;
    auto key = [](const std::vector<Halfspace>& f) {
        std::vector<std::pair<IVector, Rational>> k;
        for (const auto& h : f) k.emplace_back(h.normal, h.offset);
        std::sort(k.begin(), k.end());
        return k;
    };
    return key(facets_) == key(other.facets_);
}

VPolytope VPolytope::from_points(std::size_t dim, const std::vector<RVector>& points) {
    for (const auto& p : points)
        if (p.size() != dim) fail(ErrorKind::DimensionMismatch, "point has wrong length");
    std::vector<RVector> pts = dedupe_points(points);
    if (pts.size() < dim + 1) fail(ErrorKind::Degenerate, "need at least dim+1 points");
    const auto facets = hull_facets(dim, pts);
    VPolytope v;
    v.dim_ = dim;
    for (const auto& p : pts) {
        RMatrix tight;
        for (const auto& h : facets)
            if (dot(h.normal, p) == h.offset) tight.push_back(to_rational(h.normal));
        if (rank(std::move(tight)) == dim) v.vertices_.push_back(p);
    }
    return v;
}

FaceLattice::FaceLattice(const HPolytope& p) : polytope_(p), by_dim_(p.dim()) {
    const std::size_t n = p.dim();
    const auto& verts = p.vertices();
    const auto& inc = p.vertex_facets();

    std::vector<std::vector<std::size_t>> facet_vertices(p.facet_count());
    for (std::size_t v = 0; v < verts.size(); ++v)
        for (auto r : inc[v]) facet_vertices[r].push_back(v);

    auto facets_of = [&](const std::vector<std::size_t>& vs) {
        std::vector<std::size_t> common = inc[vs.front()];
        for (std::size_t i = 1; i < vs.size(); ++i) {
            std::vector<std::size_t> next;
            std::set_intersection(common.begin(), common.end(), inc[vs[i]].begin(), inc[vs[i]].end(),
                                  std::back_inserter(next));
            common = std::move(next);
        }
        return common;
    };

    for (std::size_t r = 0; r < p.facet_count(); ++r)
        by_dim_[n - 1].push_back({n - 1, facets_of(facet_vertices[r]), facet_vertices[r]});

    for (std::size_t k = n - 1; k >= 1; --k) {
        std::map<std::vector<std::size_t>, Face> found;
        for (const auto& f : by_dim_[k]) {
            for (std::size_t r = 0; r < p.facet_count(); ++r) {
                if (std::binary_search(f.facets.begin(), f.facets.end(), r)) continue;
                std::vector<std::size_t> w;
                std::set_intersection(f.vertices.begin(), f.vertices.end(), facet_vertices[r].begin(),
                                      facet_vertices[r].end(), std::back_inserter(w));
                if (w.empty() || found.count(w)) continue;
                std::vector<RVector> pts;
                for (auto v : w) pts.push_back(verts[v]);
                if (affine_dimension(pts) != static_cast<int>(k) - 1) continue;
                found.emplace(w, Face{k - 1, facets_of(w), w});
            }
        }
        for (auto& [key, face] : found) by_dim_[k - 1].push_back(std::move(face));
    }
}

const std::vector<Face>& FaceLattice::faces(std::size_t k) const {
    if (k >= by_dim_.size()) fail(ErrorKind::BadK, "face dimension must be below the polytope dimension");
    return by_dim_[k];
}

std::vector<std::vector<std::size_t>> FaceLattice::triangulate(const Face& f) const {
    if (f.dim == 0) return {{f.vertices.front()}};
    const std::size_t apex = f.vertices.front();  // vertices are sorted, so this is the lex-smallest
    std::vector<std::vector<std::size_t>> out;
    for (const auto& g : by_dim_[f.dim - 1]) {
        if (std::binary_search(g.vertices.begin(), g.vertices.end(), apex)) continue;
        if (!std::includes(f.vertices.begin(), f.vertices.end(), g.vertices.begin(), g.vertices.end())) continue;
        for (auto& s : triangulate(g)) {
            s.insert(s.begin(), apex);
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<std::vector<std::size_t>> FaceLattice::triangulate() const {
    Face whole;
    whole.dim = polytope_.dim();
    for (std::size_t v = 0; v < polytope_.vertices().size(); ++v) whole.vertices.push_back(v);
    if (whole.dim == 0) return {};
    // by_dim_ has no entry for the polytope itself, so recurse one level by hand.
    std::vector<std::vector<std::size_t>> out;
    const std::size_t apex = 0;
    for (const auto& g : by_dim_[whole.dim - 1]) {
        if (std::binary_search(g.vertices.begin(), g.vertices.end(), apex)) continue;
        for (auto& s : triangulate(g)) {
            s.insert(s.begin(), apex);
            out.push_back(std::move(s));
        }
    }
    return out;
}

VPolytope vertex_enumeration(const HPolytope& p) { return VPolytope::from_points(p.dim(), p.vertices()); }

HPolytope halfspace_reconstruction(const VPolytope& v) {
    return HPolytope::from_halfspaces(v.dim(), hull_facets(v.dim(), v.vertices()));
}

HPolytope intersect(const HPolytope& p, const HPolytope& q) {
    if (p.dim() != q.dim()) fail(ErrorKind::DimensionMismatch, "intersecting polytopes of different dimension");
    std::vector<Halfspace> hs = p.facets();
    hs.insert(hs.end(), q.facets().begin(), q.facets().end());
    try {
        return HPolytope::from_halfspaces(p.dim(), hs);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Degenerate) fail(ErrorKind::Empty, "intersection has empty interior");
        throw;
    }
}

Rational volume(const HPolytope& p) {
    const FaceLattice lattice(p);
    Rational vol = 0;
    for (const auto& s : lattice.triangulate()) vol += simplex_volume(p.vertices(), s);
    return vol;
}

Rational volume(const VPolytope& v) { return volume(halfspace_reconstruction(v)); }

RawMoments raw_moments(const HPolytope& p) {
    const std::size_t n = p.dim();
    const auto& verts = p.vertices();
    RawMoments m{0, RVector(n, Rational(0)), std::vector<RVector>(n, RVector(n, Rational(0)))};
    const FaceLattice lattice(p);
    const Rational denom((n + 1) * (n + 2));
    for (const auto& s : lattice.triangulate()) {
        const Rational vol = simplex_volume(verts, s);
        RVector sum(n, Rational(0));
        for (auto v : s)
            for (std::size_t k = 0; k < n; ++k) sum[k] += verts[v][k];
        m.mass += vol;
        for (std::size_t k = 0; k < n; ++k) m.first[k] += vol * sum[k] / Rational(n + 1);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                Rational acc = sum[a] * sum[b];
                for (auto v : s) acc += verts[v][a] * verts[v][b];
                m.second[a][b] += vol * acc / denom;
            }
        }
    }
    return m;
}

Moments moments(const HPolytope& p) {
    const std::size_t n = p.dim();
    const RawMoments raw = raw_moments(p);
    Moments m;
    m.volume = raw.mass;
    m.barycenter.resize(n);
    for (std::size_t k = 0; k < n; ++k) m.barycenter[k] = raw.first[k] / raw.mass;
    m.covariance.assign(n, RVector(n));
    m.variance = 0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b)
            m.covariance[a][b] = raw.second[a][b] / raw.mass - m.barycenter[a] * m.barycenter[b];
        m.variance += m.covariance[a][a];
    }
    return m;
}

double diameter(const HPolytope& p) {
    double best = 0;
    const auto& verts = p.vertices();
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const auto a = to_eigen(verts[i]);
        for (std::size_t j = i + 1; j < verts.size(); ++j) best = std::max(best, (a - to_eigen(verts[j])).norm());
    }
    return best;
}

double point_distance(std::span<const double> x, const HPolytope& p) {
    if (x.size() != p.dim()) fail(ErrorKind::DimensionMismatch, "point and polytope differ in dimension");
    RVector xr;
    xr.reserve(x.size());
    for (double c : x) xr.emplace_back(c);
    const Rational tol = rational_from_double(1e-12);
    bool inside = true;
    for (std::size_t r = 0; r < p.facet_count() && inside; ++r)
        if (p.slack(r, xr) < -tol) inside = false;
    if (inside) return 0.0;
    return NearestPointSolver(p).distance(to_eigen(x));
}

std::vector<Face> faces(const HPolytope& p, std::size_t k) {
    if (k >= p.dim()) fail(ErrorKind::BadK, "face dimension must be below the polytope dimension");
    return FaceLattice(p).faces(k);
}

HPolytope translate(const HPolytope& p, const RVector& t) {
    if (t.size() != p.dim()) fail(ErrorKind::DimensionMismatch, "translation has wrong length");
    std::vector<Halfspace> hs;
    for (const auto& h : p.facets()) hs.push_back({h.normal, h.offset + dot(h.normal, t)});
    return HPolytope::from_halfspaces(p.dim(), hs);
}

HPolytope scale(const HPolytope& p, const Rational& factor) {
    if (factor <= 0) fail(ErrorKind::InvalidInput, "scale factor must be positive");
    std::vector<Halfspace> hs;
    for (const auto& h : p.facets()) hs.push_back({h.normal, h.offset * factor});
    return HPolytope::from_halfspaces(p.dim(), hs);
}

NearestPointSolver::NearestPointSolver(const HPolytope& p) {
    const std::size_t n = p.dim();
    normals_.resize(static_cast<Eigen::Index>(p.facet_count()), static_cast<Eigen::Index>(n));
    offsets_.resize(static_cast<Eigen::Index>(p.facet_count()));
    for (std::size_t r = 0; r < p.facet_count(); ++r) {
        for (std::size_t k = 0; k < n; ++k) normals_(r, k) = p.facets()[r].normal[k].convert_to<double>();
        offsets_(r) = to_double(p.facets()[r].offset);
    }
    const FaceLattice lattice(p);
    for (std::size_t k = 0; k < n; ++k) {
        for (const auto& f : lattice.faces(k)) {
            AffinePiece piece;
            piece.origin = to_eigen(p.vertices()[f.vertices.front()]);
            if (k > 0) {
                Eigen::MatrixXd diffs(n, f.vertices.size() - 1);
                for (std::size_t j = 1; j < f.vertices.size(); ++j)
                    diffs.col(static_cast<Eigen::Index>(j - 1)) = to_eigen(p.vertices()[f.vertices[j]]) - piece.origin;
                Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(diffs);
                Eigen::MatrixXd q = qr.householderQ();
                piece.basis = q.leftCols(static_cast<Eigen::Index>(k));
            } else {
                piece.basis.resize(static_cast<Eigen::Index>(n), 0);
            }
            pieces_.push_back(std::move(piece));
        }
    }
}

bool NearestPointSolver::inside(const Eigen::VectorXd& x, double tol) const {
    const Eigen::VectorXd s = normals_ * x - offsets_;
    for (Eigen::Index r = 0; r < s.size(); ++r) {
        const double scale = 1.0 + std::abs(offsets_(r)) + normals_.row(r).norm() * x.norm();
        if (s(r) < -tol * scale) return false;
    }
    return true;
}

Eigen::VectorXd NearestPointSolver::nearest(const Eigen::VectorXd& x) const {
    if (inside(x, 1e-12)) return x;
    Eigen::VectorXd best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& piece : pieces_) {
        Eigen::VectorXd p = piece.origin;
        if (piece.basis.cols() > 0) p += piece.basis * (piece.basis.transpose() * (x - piece.origin));
        if (piece.basis.cols() > 0 && !inside(p, 1e-10)) continue;
        const double d = (x - p).norm();
        if (d < best_d) {
            best_d = d;
            best = std::move(p);
        }
    }
    return best;
}

double NearestPointSolver::distance(const Eigen::VectorXd& x) const { return (x - nearest(x)).norm(); }

Eigen::VectorXd to_eigen(const RVector& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = to_double(v[i]);
    return out;
}

Eigen::VectorXd to_eigen(std::span<const double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

}  // namespace toricgh
