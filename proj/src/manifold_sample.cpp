#include "toricgh/manifold_sample.hpp"

#include "toricgh/distances.hpp"
#include "toricgh/error.hpp"
#include "toricgh/parallel.hpp"
#include "toricgh/polytope_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <queue>

namespace toricgh {

namespace {

constexpr char kMagic[4] = {'T', 'G', 'H', 'S'};
constexpr std::uint32_t kVersion = 1;

std::vector<std::vector<int>> unit_offsets(std::size_t n) {
    std::vector<std::vector<int>> out;
    std::vector<int> o(n, -1);
    for (;;) {
        out.push_back(o);
        std::size_t k = 0;
        while (k < n && o[k] == 1) o[k++] = -1;
        if (k == n) break;
        ++o[k];
    }
    return out;
}

bool lex_positive(const std::vector<int>& o) {
    for (int x : o)
        if (x != 0) return x > 0;
    return false;
}

struct AdjacencyBuilder {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;

    void add(std::size_t a, std::size_t b, double w) {
        adj[a].emplace_back(static_cast<std::uint32_t>(b), w);
        adj[b].emplace_back(static_cast<std::uint32_t>(a), w);
    }
};

std::vector<double> dijkstra(const std::vector<std::uint64_t>& offsets, const std::vector<std::uint32_t>& targets,
                             const std::vector<double>& weights, const std::vector<std::size_t>& sources) {
    const std::size_t n = offsets.size() - 1;
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (auto s : sources) {
        dist[s] = 0;
        heap.emplace(0.0, static_cast<std::uint32_t>(s));
    }
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (std::uint64_t e = offsets[u]; e < offsets[u + 1]; ++e) {
            const double nd = d + weights[e];
            const std::uint32_t v = targets[e];
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        }
    }
    return dist;
}

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) fail(ErrorKind::InvalidInput, "truncated sample file");
    return v;
}

void put_string(std::ostream& out, const std::string& s) {
    put<std::uint64_t>(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
    const auto len = get<std::uint64_t>(in);
    if (len > (1ull << 32)) fail(ErrorKind::InvalidInput, "corrupt sample file");
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in) fail(ErrorKind::InvalidInput, "truncated sample file");
    return s;
}

}  // namespace

ToricManifoldSample ToricManifoldSample::build(const GuilleminChart& chart, const SampleConfig& cfg) {
    if (cfg.h <= 0) fail(ErrorKind::BadConfig, "grid size must be positive");
    if (cfg.delta <= 0) fail(ErrorKind::BadConfig, "boundary offset must be positive");
    if (cfg.h > cfg.delta) fail(ErrorKind::BadConfig, "grid size must not exceed the boundary offset");
    if (cfg.torus_res < 1) fail(ErrorKind::BadConfig, "torus resolution must be positive");

    const HPolytope& p = chart.polytope();
    const std::size_t n = p.dim();
    std::vector<Halfspace> inset_facets;
    for (const auto& h : p.facets()) inset_facets.push_back({h.normal, h.offset + cfg.delta});
    std::optional<HPolytope> inset;
    try {
        inset = HPolytope::from_halfspaces(n, inset_facets);
    } catch (const Error&) {
        fail(ErrorKind::BadConfig, "boundary offset leaves no full-dimensional inset");
    }

    ToricManifoldSample s;
    s.dim_ = n;
    s.m_ = cfg.torus_res;
    s.cfg_ = cfg;
    s.polytope_ = p;
    s.fiber_count_ = 1;
    for (std::size_t k = 0; k < n; ++k) {
        s.fiber_count_ *= static_cast<std::size_t>(cfg.torus_res);
        if (s.fiber_count_ > cfg.max_nodes) fail(ErrorKind::TooLarge, "torus lattice exceeds the node cap");
    }
    const auto cells = grid_cells(p, cfg.h, cfg.max_nodes / s.fiber_count_ + 1);
    const std::size_t nodes = cells.size() * s.fiber_count_ + p.vertices().size();
    if (nodes > cfg.max_nodes || nodes > std::numeric_limits<std::uint32_t>::max())
        fail(ErrorKind::TooLarge, "sample would have " + std::to_string(nodes) + " nodes");

    const NearestPointSolver project(*inset);
    std::map<std::vector<long>, std::size_t> index_of;
    for (const auto& c : cells) {
        index_of[c.index] = s.base_points_.size();
        s.base_centroids_.push_back(c.centroid);
        s.base_points_.push_back(project.nearest(c.centroid));
        s.base_cells_.push_back(c.index);
        s.base_measure_.push_back(c.volume);
    }
    for (const auto& v : p.vertices()) s.vertex_points_.push_back(to_eigen(v));

    const std::size_t base = s.base_count();
    const std::size_t fibers = s.fiber_count_;
    const auto offsets = unit_offsets(n);
    const double m = cfg.torus_res;

    auto segment = [&](std::size_t from, std::size_t to, const std::vector<int>& o) {
        std::vector<PathPoint> path;
        Eigen::VectorXd dy(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) dy(static_cast<Eigen::Index>(k)) = o[k] / m;
        constexpr int pieces = 4;
        for (int q = 0; q <= pieces; ++q) {
            const double t = static_cast<double>(q) / pieces;
            path.push_back({s.base_points_[from] + t * (s.base_points_[to] - s.base_points_[from]), t * dy});
        }
        return chart.metric_length(path);
    };

    // Edge weights between base nodes depend only on (b, b2, fiber offset); computed once, in a
    // canonical orientation so both directions carry bit-identical weights.
    struct BaseEdge {
        std::size_t to;
        std::vector<int> offset;
        double weight;
    };
    std::vector<std::vector<BaseEdge>> base_edges(base);
    parallel_for(base, [&](std::size_t b) {
        for (const auto& cell_off : offsets) {
            std::vector<long> idx = s.base_cells_[b];
            for (std::size_t k = 0; k < n; ++k) idx[k] += cell_off[k];
            const auto it = index_of.find(idx);
            if (it == index_of.end()) continue;
            const std::size_t b2 = it->second;
            for (const auto& o : offsets) {
                const bool zero = std::all_of(o.begin(), o.end(), [](int x) { return x == 0; });
                if (b2 == b && zero) continue;
                if (cfg.torus_res == 1 && !zero) continue;
                std::vector<int> neg(o);
                for (auto& x : neg) x = -x;
                const bool canonical = b < b2 || (b == b2 && lex_positive(o));
                const double w = canonical ? segment(b, b2, o) : segment(b2, b, neg);
                base_edges[b].push_back({b2, o, w});
            }
        }
    });

    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(nodes);
    for (std::size_t b = 0; b < base; ++b) {
        for (std::size_t f = 0; f < fibers; ++f) {
            const auto fi = s.fiber_index(f);
            auto& out = adj[s.node(b, f)];
            for (const auto& e : base_edges[b]) {
                std::vector<int> t(fi);
                for (std::size_t k = 0; k < n; ++k) t[k] = ((t[k] + e.offset[k]) % cfg.torus_res + cfg.torus_res) % cfg.torus_res;
                out.emplace_back(static_cast<std::uint32_t>(s.node(e.to, s.fiber_linear(t))), e.weight);
                s.grid_scale_ = std::max(s.grid_scale_, e.weight);
            }
        }
    }

    const double reach = to_double(cfg.h) * std::sqrt(static_cast<double>(n));
    for (std::size_t v = 0; v < s.vertex_count(); ++v) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& x : s.base_points_) nearest = std::min(nearest, (x - s.vertex_points_[v]).norm());
        const std::size_t vn = s.vertex_node(v);
        for (std::size_t b = 0; b < base; ++b) {
            if ((s.base_points_[b] - s.vertex_points_[v]).norm() > nearest + reach) continue;
            const double w = chart.radial_length(s.vertex_points_[v], s.base_points_[b]);
            for (std::size_t f = 0; f < fibers; ++f) {
                adj[vn].emplace_back(static_cast<std::uint32_t>(s.node(b, f)), w);
                adj[s.node(b, f)].emplace_back(static_cast<std::uint32_t>(vn), w);
            }
        }
    }

    s.offsets_.assign(nodes + 1, 0);
    for (std::size_t u = 0; u < nodes; ++u) {
        auto& list = adj[u];
        std::sort(list.begin(), list.end(), [](const auto& x, const auto& y) {
            return x.first != y.first ? x.first < y.first : x.second < y.second;
        });
        list.erase(std::unique(list.begin(), list.end(), [](const auto& x, const auto& y) { return x.first == y.first; }),
                   list.end());
        s.offsets_[u + 1] = s.offsets_[u] + list.size();
        for (const auto& [t, w] : list) {
            s.targets_.push_back(t);
            s.weights_.push_back(w);
        }
    }

    for (const auto& x : s.base_points_) {
        const MetricTensor g = chart.hessian(x);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.g_inv);
        s.fiber_resolution_ = std::max(s.fiber_resolution_, std::sqrt(es.eigenvalues().maxCoeff()) / m);
    }
    s.compute_distances();
    return s;
}

void ToricManifoldSample::compute_distances() {
    const std::size_t base = base_count();
    rows_.assign(base + vertex_count(), {});
    parallel_for(rows_.size(), [&](std::size_t r) {
        const std::size_t src = r < base ? node(r, 0) : vertex_node(r - base);
        rows_[r] = dijkstra(offsets_, targets_, weights_, {src});
    });
    diameter_ = 0;
    diameter_pair_ = {0, 0};
    std::vector<std::pair<double, std::size_t>> row_max(rows_.size(), {0.0, 0});
    parallel_for(rows_.size(), [&](std::size_t r) {
        const std::size_t src = r < base ? node(r, 0) : vertex_node(r - base);
        for (std::size_t t = 0; t < node_count(); ++t) {
            const double d = distance(src, t);
            if (d > row_max[r].first) row_max[r] = {d, t};
        }
    });
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (row_max[r].first > diameter_) {
            diameter_ = row_max[r].first;
            diameter_pair_ = {r < base ? node(r, 0) : vertex_node(r - base), row_max[r].second};
        }
    }
}

const Eigen::VectorXd& ToricManifoldSample::moment(std::size_t node) const {
    return is_vertex(node) ? vertex_points_[vertex_of(node)] : base_points_[base_of(node)];
}

std::vector<int> ToricManifoldSample::fiber_index(std::size_t fiber) const {
    std::vector<int> idx(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
        idx[k] = static_cast<int>(fiber % static_cast<std::size_t>(m_));
        fiber /= static_cast<std::size_t>(m_);
    }
    return idx;
}

std::size_t ToricManifoldSample::fiber_linear(const std::vector<int>& index) const {
    std::size_t f = 0;
    for (std::size_t k = dim_; k-- > 0;) f = f * static_cast<std::size_t>(m_) + static_cast<std::size_t>(index[k]);
    return f;
}

Eigen::VectorXd ToricManifoldSample::fiber_coordinates(std::size_t node) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
    if (is_vertex(node)) return y;
    const auto idx = fiber_index(fiber_of(node));
    for (std::size_t k = 0; k < dim_; ++k) y(static_cast<Eigen::Index>(k)) = static_cast<double>(idx[k]) / m_;
    return y;
}

double ToricManifoldSample::measure(std::size_t node) const {
    if (is_vertex(node)) return 0.0;
    return to_double(base_measure_[base_of(node)] / Rational(static_cast<long>(fiber_count_)));
}

Rational ToricManifoldSample::total_measure() const {
    Rational t = 0;
    for (const auto& v : base_measure_) t += v;
    return t;
}

std::size_t ToricManifoldSample::shift(std::size_t node, std::size_t generator, int steps) const {
    if (is_vertex(node)) return node;
    if (generator >= dim_) fail(ErrorKind::InvalidInput, "shift generator out of range");
    auto idx = fiber_index(fiber_of(node));
    idx[generator] = ((idx[generator] + steps) % m_ + m_) % m_;
    return this->node(base_of(node), fiber_linear(idx));
}

double ToricManifoldSample::distance(std::size_t a, std::size_t b) const {
    if (a == b) return 0.0;
    const std::size_t base = base_count();
    const bool va = is_vertex(a), vb = is_vertex(b);
    if (va && vb) return std::min(rows_[base + vertex_of(a)][b], rows_[base + vertex_of(b)][a]);
    if (vb) std::swap(a, b);
    if (va || vb) {
        // a is the vertex node now; distances from it are constant along fibers up to rounding,
        // so take the fiber minimum to keep shift invariance exact.
        const auto& row = rows_[base + vertex_of(a)];
        const std::size_t bb = base_of(b);
        double d = rows_[bb][a];
        for (std::size_t f = 0; f < fiber_count_; ++f) d = std::min(d, row[node(bb, f)]);
        return d;
    }
    auto fa = fiber_index(fiber_of(a));
    auto fb = fiber_index(fiber_of(b));
    std::vector<int> ab(dim_), ba(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
        ab[k] = ((fb[k] - fa[k]) % m_ + m_) % m_;
        ba[k] = ((fa[k] - fb[k]) % m_ + m_) % m_;
    }
    return std::min(rows_[base_of(a)][node(base_of(b), fiber_linear(ab))],
                    rows_[base_of(b)][node(base_of(a), fiber_linear(ba))]);
}

double ToricManifoldSample::diameter() const { return diameter_; }

std::vector<double> multi_source_distances(const ToricManifoldSample& s, const std::vector<std::size_t>& sources) {
    return dijkstra(s.offsets(), s.targets(), s.weights(), sources);
}

void ToricManifoldSample::write(std::ostream& out) const {
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m_));
    put<std::uint64_t>(out, base_count());
    put<std::uint64_t>(out, vertex_count());
    put<std::uint64_t>(out, targets_.size());
    nlohmann::json header{{"polytope", polytope_to_json(polytope_)},
                          {"h", to_string(cfg_.h)},
                          {"delta", to_string(cfg_.delta)},
                          {"torus_res", cfg_.torus_res},
                          {"seed", cfg_.seed},
                          {"max_nodes", cfg_.max_nodes}};
    put_string(out, header.dump());
    for (std::size_t b = 0; b < base_count(); ++b) {
        for (long c : base_cells_[b]) put<std::int64_t>(out, c);
        for (Eigen::Index k = 0; k < base_points_[b].size(); ++k) put<double>(out, base_points_[b](k));
        for (Eigen::Index k = 0; k < base_centroids_[b].size(); ++k) put<double>(out, base_centroids_[b](k));
        put_string(out, to_string(base_measure_[b]));
    }
    for (const auto& v : vertex_points_)
        for (Eigen::Index k = 0; k < v.size(); ++k) put<double>(out, v(k));
    for (auto o : offsets_) put<std::uint64_t>(out, o);
    for (auto t : targets_) put<std::uint32_t>(out, t);
    for (auto w : weights_) put<double>(out, w);
    for (std::size_t u = 0; u < node_count(); ++u) put<double>(out, measure(u));
    put<double>(out, grid_scale_);
    put<double>(out, fiber_resolution_);
}

ToricManifoldSample ToricManifoldSample::read(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) fail(ErrorKind::InvalidInput, "not a sample file");
    if (get<std::uint32_t>(in) != kVersion) fail(ErrorKind::InvalidInput, "unsupported sample file version");
    ToricManifoldSample s;
    s.dim_ = get<std::uint32_t>(in);
    s.m_ = static_cast<int>(get<std::uint32_t>(in));
    const auto base = get<std::uint64_t>(in);
    const auto verts = get<std::uint64_t>(in);
    const auto edges = get<std::uint64_t>(in);
    const auto header = nlohmann::json::parse(get_string(in));
    s.polytope_ = polytope_from_json(header["polytope"]);
    s.cfg_.h = parse_rational(header["h"].get<std::string>());
    s.cfg_.delta = parse_rational(header["delta"].get<std::string>());
    s.cfg_.torus_res = header["torus_res"].get<int>();
    s.cfg_.seed = header["seed"].get<std::uint64_t>();
    s.cfg_.max_nodes = header["max_nodes"].get<std::size_t>();
    s.fiber_count_ = 1;
    for (std::size_t k = 0; k < s.dim_; ++k) s.fiber_count_ *= static_cast<std::size_t>(s.m_);
    for (std::uint64_t b = 0; b < base; ++b) {
        std::vector<long> cell(s.dim_);
        for (auto& c : cell) c = get<std::int64_t>(in);
        Eigen::VectorXd x(static_cast<Eigen::Index>(s.dim_));
        for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = get<double>(in);
        Eigen::VectorXd c(static_cast<Eigen::Index>(s.dim_));
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = get<double>(in);
        s.base_centroids_.push_back(std::move(c));
        s.base_cells_.push_back(std::move(cell));
        s.base_points_.push_back(std::move(x));
        s.base_measure_.push_back(parse_rational(get_string(in)));
    }
    for (std::uint64_t v = 0; v < verts; ++v) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(s.dim_));
        for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = get<double>(in);
        s.vertex_points_.push_back(std::move(x));
    }
    const std::size_t nodes = s.node_count();
    s.offsets_.resize(nodes + 1);
    for (auto& o : s.offsets_) o = get<std::uint64_t>(in);
    s.targets_.resize(edges);
    for (auto& t : s.targets_) t = get<std::uint32_t>(in);
    s.weights_.resize(edges);
    for (auto& w : s.weights_) w = get<double>(in);
    for (std::size_t u = 0; u < nodes; ++u) get<double>(in);
    s.grid_scale_ = get<double>(in);
    s.fiber_resolution_ = get<double>(in);
    if (s.offsets_.back() != edges) fail(ErrorKind::InvalidInput, "corrupt CSR table");
    s.compute_distances();
    return s;
}

}  // namespace toricgh
