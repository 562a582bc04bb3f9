#include "toricgh/gh.hpp"

#include "combinatorics.hpp"
#include "toricgh/distances.hpp"
#include "toricgh/error.hpp"
#include "toricgh/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <tuple>

namespace toricgh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Distance from x to conv(points): the nearest point lies on a simplex spanned by at most
// max_size of the points, so try them all.
double hull_distance(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& points, std::size_t max_size) {
    double best = kInf;
    for (const auto& p : points) best = std::min(best, (x - p).norm());
    for (std::size_t size = 2; size <= std::min(max_size, points.size()); ++size) {
        detail::for_each_combination(points.size(), size, [&](const std::vector<std::size_t>& s) {
            const Eigen::VectorXd& o = points[s[0]];
            Eigen::MatrixXd e(x.size(), static_cast<Eigen::Index>(size - 1));
            for (std::size_t j = 1; j < size; ++j) e.col(static_cast<Eigen::Index>(j - 1)) = points[s[j]] - o;
            const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(e);
            if (qr.rank() < e.cols()) return true;
            const Eigen::VectorXd t = qr.solve(x - o);
            if (t.minCoeff() < -1e-12 || t.sum() > 1 + 1e-12) return true;
            best = std::min(best, (x - o - e * t).norm());
            return true;
        });
    }
    return best;
}

std::vector<Eigen::VectorXd> face_points(const HPolytope& p, const Face& f) {
    std::vector<Eigen::VectorXd> out;
    for (auto v : f.vertices) out.push_back(to_eigen(p.vertices()[v]));
    return out;
}

double face_gap(const std::vector<Eigen::VectorXd>& a, std::size_t ka, const std::vector<Eigen::VectorXd>& b,
                std::size_t kb) {
    double gap = 0;
    for (const auto& x : a) gap = std::max(gap, hull_distance(x, b, kb + 1));
    for (const auto& x : b) gap = std::max(gap, hull_distance(x, a, ka + 1));
    return gap;
}

double face_measure(const FaceLattice& lattice, const Face& f) {
    if (f.dim == 0) return 1.0;
    const auto& verts = lattice.polytope().vertices();
    double total = 0;
    double factorial = 1;
    for (std::size_t j = 2; j <= f.dim; ++j) factorial *= static_cast<double>(j);
    for (const auto& s : lattice.triangulate(f)) {
        const Eigen::VectorXd o = to_eigen(verts[s[0]]);
        Eigen::MatrixXd e(o.size(), static_cast<Eigen::Index>(s.size() - 1));
        for (std::size_t j = 1; j < s.size(); ++j) e.col(static_cast<Eigen::Index>(j - 1)) = to_eigen(verts[s[j]]) - o;
        total += std::sqrt(std::max(0.0, (e.transpose() * e).determinant())) / factorial;
    }
    return total;
}

Eigen::VectorXd normal_of(const Halfspace& h) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(h.normal.size()));
    for (std::size_t k = 0; k < h.normal.size(); ++k) v(static_cast<Eigen::Index>(k)) = h.normal[k].convert_to<double>();
    return v;
}

double slack(const Halfspace& h, const Eigen::VectorXd& x) { return normal_of(h).dot(x) - to_double(h.offset); }

// pairing[r] = facet of `source` with the same primitive normal as facet r of `target`.
std::optional<std::vector<std::size_t>> fan_pairing(const HPolytope& source, const HPolytope& target) {
    if (source.dim() != target.dim() || source.facet_count() != target.facet_count()) return std::nullopt;
    std::vector<std::size_t> pairing;
    for (const auto& t : target.facets()) {
        const auto it = std::find_if(source.facets().begin(), source.facets().end(),
                                     [&](const Halfspace& s) { return s.normal == t.normal; });
        if (it == source.facets().end()) return std::nullopt;
        pairing.push_back(static_cast<std::size_t>(it - source.facets().begin()));
    }
    return pairing;
}

std::size_t map_fiber(const ToricManifoldSample& from, const ToricManifoldSample& to, std::size_t fiber) {
    if (from.torus_res() == to.torus_res()) return fiber;
    auto idx = from.fiber_index(fiber);
    for (auto& i : idx) {
        const long scaled = std::lround(static_cast<double>(i) * to.torus_res() / from.torus_res());
        i = static_cast<int>(scaled % to.torus_res());
    }
    return to.fiber_linear(idx);
}

std::size_t nearest_base(const ToricManifoldSample& s, const Eigen::VectorXd& x) {
    std::size_t best = 0;
    double bd = kInf;
    for (std::size_t b = 0; b < s.base_count(); ++b) {
        const double d = (s.base_points()[b] - x).squaredNorm();
        if (d < bd) {
            bd = d;
            best = b;
        }
    }
    return best;
}

std::size_t nearest_vertex(const ToricManifoldSample& s, const Eigen::VectorXd& x) {
    std::size_t best = 0;
    double bd = kInf;
    for (std::size_t v = 0; v < s.vertex_count(); ++v) {
        const double d = (s.vertex_points()[v] - x).squaredNorm();
        if (d < bd) {
            bd = d;
            best = v;
        }
    }
    return best;
}

// Multi-source Dijkstra that also records which source reached each node.
void labelled_distances(const ToricManifoldSample& s, const std::vector<std::size_t>& sources, std::vector<double>& dist,
                        std::vector<std::size_t>& label) {
    const std::size_t n = s.node_count();
    dist.assign(n, kInf);
    label.assign(n, std::numeric_limits<std::size_t>::max());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (auto src : sources) {
        if (dist[src] == 0) continue;
        dist[src] = 0;
        label[src] = src;
        heap.emplace(0.0, src);
    }
    const auto& off = s.offsets();
    const auto& tgt = s.targets();
    const auto& w = s.weights();
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (auto e = off[u]; e < off[u + 1]; ++e) {
            const double nd = d + w[e];
            if (nd < dist[tgt[e]]) {
                dist[tgt[e]] = nd;
                label[tgt[e]] = label[u];
                heap.emplace(nd, tgt[e]);
            }
        }
    }
}

std::size_t apply_rho(const ToricManifoldSample& s, const GroupAutomorphism& rho, std::size_t node, std::size_t generator) {
    for (std::size_t j = 0; j < s.dim(); ++j) {
        const long steps = (rho.matrix[j][generator] % s.torus_res()).convert_to<long>();
        if (steps != 0) node = s.shift(node, j, static_cast<int>(steps));
    }
    return node;
}

double max_over(std::size_t n, const std::function<double(std::size_t)>& f) {
    const std::size_t chunks = std::min<std::size_t>(n, 64);
    std::vector<double> best(chunks, 0.0);
    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
        for (std::size_t i = lo; i < hi; ++i) best[c] = std::max(best[c], f(i));
    });
    return best.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
}

}  // namespace

FaceMatch face_convergence_report(const HPolytope& pi, const HPolytope& p, std::size_t k, double tolerance,
                                  double essential_fraction) {
    if (pi.dim() != p.dim()) fail(ErrorKind::DimensionMismatch, "polytopes of different dimension");
    if (k >= p.dim()) fail(ErrorKind::BadK, "face dimension must be below the ambient dimension");
    const FaceLattice ls(pi), lt(p);
    const auto& fs = ls.faces(k);
    const auto& ft = lt.faces(k);
    const double threshold = essential_fraction * std::pow(diameter(p), static_cast<double>(k));

    std::vector<std::vector<Eigen::VectorXd>> ps, pt;
    for (const auto& f : fs) ps.push_back(face_points(pi, f));
    for (const auto& f : ft) pt.push_back(face_points(p, f));
    std::vector<FacePair> all;
    for (std::size_t a = 0; a < fs.size(); ++a)
        for (std::size_t b = 0; b < ft.size(); ++b) all.push_back({a, b, face_gap(ps[a], k, pt[b], k), 0, false});
    std::stable_sort(all.begin(), all.end(), [](const FacePair& x, const FacePair& y) { return x.gap < y.gap; });

    FaceMatch out;
    out.k = k;
    out.source_faces = fs.size();
    out.target_faces = ft.size();
    std::vector<bool> used_s(fs.size(), false), used_t(ft.size(), false);
    for (auto pr : all) {
        if (used_s[pr.source] || used_t[pr.target]) continue;
        used_s[pr.source] = used_t[pr.target] = true;
        pr.measure = face_measure(ls, fs[pr.source]);
        pr.essential = pr.gap <= tolerance && pr.measure >= threshold;
        out.matched.push_back(pr);
    }
    for (std::size_t a = 0; a < fs.size(); ++a)
        if (!used_s[a]) out.unmatched_source.push_back(a);
    for (std::size_t b = 0; b < ft.size(); ++b)
        if (!used_t[b]) out.unmatched_target.push_back(b);
    out.within_tolerance = std::all_of(out.matched.begin(), out.matched.end(),
                                       [&](const FacePair& m) { return m.gap < tolerance; });
    out.count_inequality = ft.size() <= fs.size();
    if (k + 1 == p.dim()) {
        for (const auto& m : out.matched) {
            const Halfspace& hs = pi.facets()[fs[m.source].facets.front()];
            const Halfspace& ht = p.facets()[ft[m.target].facets.front()];
            out.facets.push_back({hs.normal, ht.normal, hs.offset, ht.offset});
        }
    }
    return out;
}

NormalStability normal_stability(const std::vector<HPolytope>& sequence, const HPolytope& p) {
    if (!is_delzant(p).pass) fail(ErrorKind::NotDelzant, "limit polytope is not Delzant");
    for (const auto& q : sequence)
        if (!is_delzant(q).pass) fail(ErrorKind::NotDelzant, "sequence member is not Delzant");
    NormalStability out;
    out.limit_facets = p.facet_count();
    for (const auto& q : sequence) out.facet_counts.push_back(q.facet_count());
    for (std::size_t r = 0; r < p.facet_count(); ++r) {
        const Eigen::VectorXd u = normal_of(p.facets()[r]);
        const double lam = to_double(p.facets()[r].offset) / u.norm();
        NormalTrack t;
        t.facet = r;
        for (const auto& q : sequence) {
            std::size_t best = 0;
            double bd = kInf;
            for (std::size_t s = 0; s < q.facet_count(); ++s) {
                const Eigen::VectorXd v = normal_of(q.facets()[s]);
                const double d = (v / v.norm() - u / u.norm()).norm() +
                                 std::abs(to_double(q.facets()[s].offset) / v.norm() - lam);
                if (d < bd) {
                    bd = d;
                    best = s;
                }
            }
            t.normals.push_back(q.facets()[best].normal);
            t.offsets.push_back(q.facets()[best].offset);
        }
        const std::size_t half = t.normals.size() / 2;
        t.eventually_constant = !t.normals.empty() &&
                                std::all_of(t.normals.begin() + static_cast<std::ptrdiff_t>(half), t.normals.end(),
                                            [&](const IVector& v) { return v == t.normals.back(); });
        out.tracks.push_back(std::move(t));
    }
    out.facet_count_mismatch = !sequence.empty() && sequence.back().facet_count() != p.facet_count();
    out.stable = !out.facet_count_mismatch &&
                 std::all_of(out.tracks.begin(), out.tracks.end(), [](const NormalTrack& t) { return t.eventually_constant; });
    return out;
}

std::string to_string(MapKind k) {
    switch (k) {
        case MapKind::ChartAffine: return "chart-affine";
        case MapKind::Greedy: return "greedy";
        case MapKind::Custom: return "custom";
    }
    return "custom";
}

GroupAutomorphism GroupAutomorphism::identity(std::size_t n) {
    IMatrix m(n, IVector(n, Integer(0)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return {m};
}

GroupAutomorphism GroupAutomorphism::inversion(std::size_t n) {
    IMatrix m(n, IVector(n, Integer(0)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = -1;
    return {m};
}

ApproxMap build_approx_map(const ToricManifoldSample& source, const ToricManifoldSample& target) {
    const HPolytope& ps = source.polytope();
    const HPolytope& pt = target.polytope();
    if (ps.dim() != pt.dim()) fail(ErrorKind::DimensionMismatch, "samples of different dimension");
    const auto pairing = fan_pairing(ps, pt);
    if (!pairing)
        fail(ErrorKind::NormalFanMismatch, "normal fans differ (" + std::to_string(ps.facet_count()) + " vs " +
                                               std::to_string(pt.facet_count()) + " facets)");
    const std::size_t n = pt.dim(), nf = pt.facet_count();

    auto widths = [](const HPolytope& p) {
        std::vector<double> w;
        for (const auto& h : p.facets()) {
            double m = 0;
            for (const auto& v : p.vertices()) m = std::max(m, slack(h, to_eigen(v)));
            w.push_back(m);
        }
        return w;
    };
    const auto ws = widths(ps), wt = widths(pt);
    Eigen::MatrixXd a(static_cast<Eigen::Index>(nf), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < nf; ++r) a.row(static_cast<Eigen::Index>(r)) = normal_of(pt.facets()[r]).transpose() / wt[r];
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);

    auto carry = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(nf));
        for (std::size_t r = 0; r < nf; ++r) {
            const std::size_t s = (*pairing)[r];
            rhs(static_cast<Eigen::Index>(r)) = slack(ps.facets()[s], x) / ws[s] + to_double(pt.facets()[r].offset) / wt[r];
        }
        return Eigen::VectorXd(qr.solve(rhs));
    };

    ApproxMap f{&source, &target, std::vector<std::size_t>(source.node_count()), GroupAutomorphism::identity(n),
                MapKind::ChartAffine};
    // Carried base points snap to the nearest target base point; exact ties (common for dyadic
    // dilations) go to the target cell containing the carried cell centroid. A repair pass then
    // moves doubly covered preimages onto target base nodes that were missed.
    const std::size_t bs = source.base_count(), bt = target.base_count();
    const double h = to_double(target.config().h);
    std::vector<Eigen::VectorXd> carried(bs);
    std::vector<std::size_t> base_image(bs, bt);
    parallel_for(bs, [&](std::size_t b) {
        carried[b] = carry(source.base_points()[b]);
        const Eigen::VectorXd c = carry(source.base_centroids()[b]);
        std::vector<long> cell(n);
        for (std::size_t k = 0; k < n; ++k) cell[k] = static_cast<long>(std::floor(c(static_cast<Eigen::Index>(k)) / h + 1e-9));
        double best = kInf;
        for (std::size_t t = 0; t < bt; ++t) best = std::min(best, (target.base_points()[t] - carried[b]).norm());
        for (std::size_t t = 0; t < bt; ++t) {
            if ((target.base_points()[t] - carried[b]).norm() > best + 1e-9) continue;
            if (base_image[b] == bt || target.base_cells()[t] == cell) base_image[b] = t;
        }
    });
    std::vector<std::size_t> cover(bt, 0);
    for (auto t : base_image) ++cover[t];
    const double radius = 2 * h * std::sqrt(static_cast<double>(n));
    for (std::size_t t = 0; t < bt; ++t) {
        if (cover[t] > 0) continue;
        std::size_t pick = bs;
        double best = radius;
        for (std::size_t b = 0; b < bs; ++b) {
            const double d = (target.base_points()[t] - carried[b]).norm();
            if (cover[base_image[b]] >= 2 && d < best) {
                best = d;
                pick = b;
            }
        }
        if (pick == bs) continue;
        --cover[base_image[pick]];
        base_image[pick] = t;
        ++cover[t];
    }
    for (std::size_t b = 0; b < source.base_count(); ++b)
        for (std::size_t fi = 0; fi < source.fiber_count(); ++fi)
            f.assignment[source.node(b, fi)] = target.node(base_image[b], map_fiber(source, target, fi));

    for (std::size_t v = 0; v < source.vertex_count(); ++v) {
        std::vector<std::size_t> tight;
        for (std::size_t r = 0; r < nf; ++r)
            if (ps.slack((*pairing)[r], ps.vertices()[v]) == 0) tight.push_back(r);
        std::size_t image = target.vertex_count();
        for (std::size_t w = 0; w < target.vertex_count(); ++w)
            if (pt.vertex_facets()[w] == tight) image = w;
        if (image == target.vertex_count()) image = nearest_vertex(target, carry(source.vertex_points()[v]));
        f.assignment[source.vertex_node(v)] = target.vertex_node(image);
    }
    return f;
}

ApproxMap build_greedy_map(const ToricManifoldSample& source, const ToricManifoldSample& target) {
    if (source.dim() != target.dim()) fail(ErrorKind::DimensionMismatch, "samples of different dimension");
    ApproxMap f{&source, &target, std::vector<std::size_t>(source.node_count()), GroupAutomorphism::identity(source.dim()),
                MapKind::Greedy};
    std::vector<std::size_t> base_image(source.base_count());
    parallel_for(source.base_count(), [&](std::size_t b) { base_image[b] = nearest_base(target, source.base_points()[b]); });
    for (std::size_t b = 0; b < source.base_count(); ++b)
        for (std::size_t fi = 0; fi < source.fiber_count(); ++fi)
            f.assignment[source.node(b, fi)] = target.node(base_image[b], map_fiber(source, target, fi));
    for (std::size_t v = 0; v < source.vertex_count(); ++v)
        f.assignment[source.vertex_node(v)] = target.vertex_node(nearest_vertex(target, source.vertex_points()[v]));
    return f;
}

ApproxMap identity_map(const ToricManifoldSample& s) {
    ApproxMap f{&s, &s, std::vector<std::size_t>(s.node_count()), GroupAutomorphism::identity(s.dim()), MapKind::Custom};
    std::iota(f.assignment.begin(), f.assignment.end(), std::size_t{0});
    return f;
}

DistortionReport eqgh_distortion(const ApproxMap& f, const DistortionOptions& opt) {
    const ToricManifoldSample& x = *f.source;
    const ToricManifoldSample& y = *f.target;
    if (f.assignment.size() != x.node_count()) fail(ErrorKind::InvalidInput, "map is not total");
    DistortionReport r;

    std::vector<std::size_t> image(f.assignment);
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    std::vector<double> dist;
    std::vector<std::size_t> label;
    labelled_distances(y, image, dist, label);
    r.eps_surj = *std::max_element(dist.begin(), dist.end());

    const std::size_t n = x.node_count();
    auto defect = [&](std::size_t a, std::size_t b) {
        return std::abs(x.distance(a, b) - y.distance(f.assignment[a], f.assignment[b]));
    };
    const std::size_t all_pairs = n * (n - 1) / 2;
    if (opt.exhaustive || all_pairs <= opt.max_pairs) {
        r.exhaustive = true;
        r.pairs = all_pairs;
        r.eps_iso = max_over(n, [&](std::size_t a) {
            double m = 0;
            for (std::size_t b = a + 1; b < n; ++b) m = std::max(m, defect(a, b));
            return m;
        });
    } else {
        // Both diametral configurations are always included: they are the pairs that make
        // |Diam X - Diam Y| <= eps_iso + 2 eps_surj hold for the sampled estimate.
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        pairs.push_back(x.diameter_pair());
        std::map<std::size_t, std::size_t> preimage;
        for (std::size_t a = 0; a < n; ++a) preimage.emplace(f.assignment[a], a);
        const auto [y1, y2] = y.diameter_pair();
        pairs.emplace_back(preimage.at(label[y1]), preimage.at(label[y2]));
        std::mt19937_64 rng(opt.seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        while (pairs.size() < opt.max_pairs) pairs.emplace_back(pick(rng), pick(rng));
        r.pairs = pairs.size();
        r.eps_iso = max_over(pairs.size(), [&](std::size_t i) { return defect(pairs[i].first, pairs[i].second); });
    }

    for (std::size_t g = 0; g < x.dim(); ++g) {
        r.eps_equiv = std::max(r.eps_equiv, max_over(n, [&](std::size_t a) {
            return y.distance(f.assignment[x.shift(a, g)], apply_rho(y, f.rho, f.assignment[a], g));
        }));
    }
    r.eps = std::max({r.eps_iso, r.eps_surj, r.eps_equiv});
    return r;
}

GHBounds gh_bounds(const ToricManifoldSample& x, const ToricManifoldSample& y, const DistortionOptions& opt) {
    GHBounds b;
    b.lower = std::abs(x.diameter() - y.diameter()) / 2;
    std::vector<ApproxMap> maps;
    if (fan_pairing(x.polytope(), y.polytope()) && x.torus_res() == y.torus_res()) {
        maps.push_back(build_approx_map(x, y));
        maps.push_back(build_approx_map(y, x));
    } else {
        maps.push_back(build_greedy_map(x, y));
        maps.push_back(build_greedy_map(y, x));
    }
    b.upper = kInf;
    for (const auto& f : maps) {
        const DistortionReport r = eqgh_distortion(f, opt);
        const double u = 0.5 * (r.eps_iso + 2 * r.eps_surj);
        if (u < b.upper) {
            b.upper = u;
            b.upper_map = f.kind;
        }
    }
    return b;
}

std::vector<std::size_t> fixed_point_proxies(const ToricManifoldSample& s) {
    const double threshold = 2 * s.fiber_resolution();
    std::vector<double> orbit(s.base_count(), 0.0);
    parallel_for(s.base_count(), [&](std::size_t b) {
        for (std::size_t fi = 1; fi < s.fiber_count(); ++fi)
            orbit[b] = std::max(orbit[b], s.distance(s.node(b, 0), s.node(b, fi)));
    });
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < s.base_count(); ++b)
        if (orbit[b] < threshold) out.push_back(s.node(b, 0));
    for (std::size_t v = 0; v < s.vertex_count(); ++v) out.push_back(s.vertex_node(v));
    return out;
}

FixedPointReport fixed_point_tracking(const std::vector<const ToricManifoldSample*>& family,
                                      const ToricManifoldSample& limit, const std::vector<ApproxMap>& maps) {
    if (family.size() != maps.size()) fail(ErrorKind::InvalidInput, "one map per family member is required");
    FixedPointReport out;
    out.limit_vertices = limit.vertex_count();
    out.count_inequality = true;
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (maps[i].source != family[i] || maps[i].target != &limit)
            fail(ErrorKind::InvalidInput, "map does not connect the family member to the limit");
        const auto proxies = fixed_point_proxies(*family[i]);
        FixedPointStep step;
        step.proxies = proxies.size();
        for (auto p : proxies) {
            double d = kInf;
            for (std::size_t v = 0; v < limit.vertex_count(); ++v)
                d = std::min(d, limit.distance(maps[i].assignment[p], limit.vertex_node(v)));
            step.gap = std::max(step.gap, d);
        }
        step.count_ok = step.proxies >= out.limit_vertices;
        out.count_inequality = out.count_inequality && step.count_ok;
        out.steps.push_back(step);
    }
    return out;
}

Reconstruction reconstruct_polytope(const ApproxMap& f) {
    const ToricManifoldSample& s = *f.source;
    const ToricManifoldSample& t = *f.target;
    const HPolytope& p = t.polytope();
    Reconstruction out;
    for (std::size_t b = 0; b < s.base_count(); ++b) out.cloud.push_back(t.moment(f.assignment[s.node(b, 0)]));
    for (std::size_t v = 0; v < s.vertex_count(); ++v) out.cloud.push_back(t.moment(f.assignment[s.vertex_node(v)]));
    for (const auto& c : out.cloud) out.outside = std::max(out.outside, point_distance(std::span<const double>(c.data(), c.size()), p));

    // P -> cloud over the vertices and a barycentric grid of spacing about h on every facet.
    const double h = to_double(s.config().h);
    std::vector<Eigen::VectorXd> scan;
    for (const auto& v : p.vertices()) scan.push_back(to_eigen(v));
    const FaceLattice lattice(p);
    if (p.dim() >= 2) {
        for (const auto& facet : lattice.faces(p.dim() - 1)) {
            for (const auto& simplex : lattice.triangulate(facet)) {
                std::vector<Eigen::VectorXd> corners;
                double longest = 0;
                for (auto v : simplex) corners.push_back(to_eigen(p.vertices()[v]));
                for (const auto& a : corners)
                    for (const auto& b : corners) longest = std::max(longest, (a - b).norm());
                const int denom = std::max(1, static_cast<int>(std::ceil(longest / h)));
                std::vector<int> c(corners.size(), 0);
                // Enumerate compositions of denom into corners.size() parts.
                std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
                    if (i + 1 == corners.size()) {
                        c[i] = left;
                        Eigen::VectorXd x = Eigen::VectorXd::Zero(corners[0].size());
                        for (std::size_t j = 0; j < corners.size(); ++j) x += (static_cast<double>(c[j]) / denom) * corners[j];
                        scan.push_back(x);
                        return;
                    }
                    for (int k = 0; k <= left; ++k) {
                        c[i] = k;
                        rec(i + 1, left - k);
                    }
                };
                rec(0, denom);
            }
        }
    }
    double back = 0;
    for (const auto& x : scan) {
        double d = kInf;
        for (const auto& c : out.cloud) d = std::min(d, (x - c).norm());
        back = std::max(back, d);
    }
    out.gap = std::max(out.outside, back);
    return out;
}

FiberAverage fiber_average(const std::string& function, const ApproxMap& f) {
    const ToricManifoldSample& s = *f.source;
    const ToricManifoldSample& t = *f.target;
    const ScalarField phi = test_function(function, s.dim());
    FiberAverage out;
    out.function = function;
    out.mass = s.total_measure();
    double integral = 0, section = 0;
    for (std::size_t b = 0; b < s.base_count(); ++b) {
        double avg = 0;
        for (std::size_t fi = 0; fi < s.fiber_count(); ++fi) avg += phi(t.moment(f.assignment[s.node(b, fi)]));
        avg /= static_cast<double>(s.fiber_count());
        const double w = to_double(s.base_measure()[b]);
        integral += w * avg;
        section += w * phi(t.moment(f.assignment[s.node(b, 0)]));
    }
    out.integral = integral;
    out.target = integrate_test_function(t.polytope(), function);
    out.gap = std::abs(integral - out.target);
    out.section_gap = std::abs(integral - section) / to_double(out.mass);
    return out;
}

}  // namespace toricgh
