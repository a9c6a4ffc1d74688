#include "cpvl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace cpvl {

std::string to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::torus: return "torus";
        case GraphKind::tree_ball: return "tree_ball";
        case GraphKind::cycle: return "cycle";
        case GraphKind::complete: return "complete";
        case GraphKind::edge_pair: return "edge_pair";
        case GraphKind::empty: return "empty";
    }
    return "unknown";
}

GraphKind graph_kind_from_string(const std::string& name) {
    for (auto k : {GraphKind::torus, GraphKind::tree_ball, GraphKind::cycle, GraphKind::complete,
                   GraphKind::edge_pair, GraphKind::empty}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown graph kind '" + name + "'");
}

Graph::Graph(GraphParams params, std::vector<std::vector<Vertex>> lists, int degree,
             std::vector<Vertex> boundary)
    : params_(params), degree_(degree), boundary_(std::move(boundary)) {
    offsets_.reserve(lists.size() + 1);
    offsets_.push_back(0);
    for (const auto& l : lists) {
        adjacency_.insert(adjacency_.end(), l.begin(), l.end());
        offsets_.push_back(adjacency_.size());
    }
    on_boundary_.assign(lists.size(), 0);
    for (Vertex v : boundary_) on_boundary_[v] = 1;

    // Realised sphere sizes around the origin.
    if (!lists.empty()) {
        auto dist = distances_from(0);
        std::vector<std::size_t> sphere;
        for (auto r : dist) {
            if (r == std::numeric_limits<std::uint32_t>::max()) continue;
            if (sphere.size() <= r) sphere.resize(r + 1, 0);
            ++sphere[r];
        }
        for (std::size_t n = 1; n < sphere.size(); ++n) {
            growth_constant_ = std::max(growth_constant_,
                                        std::log(static_cast<double>(sphere[n])) / static_cast<double>(n));
        }
    }
}

std::span<const Vertex> Graph::neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

std::vector<std::uint32_t> Graph::distances_from(Vertex source) const {
    constexpr auto unreachable = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> dist(vertex_count(), unreachable);
    std::deque<Vertex> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        Vertex v = queue.front();
        queue.pop_front();
        for (Vertex w : neighbors(v)) {
            if (dist[w] == unreachable) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

std::string Graph::describe() const {
    switch (params_.kind) {
        case GraphKind::torus:
            return "torus(d=" + std::to_string(params_.dim) + ",L=" + std::to_string(params_.size) + ")";
        case GraphKind::tree_ball:
            return "tree_ball(degree=" + std::to_string(params_.degree) +
                   ",depth=" + std::to_string(params_.depth) + ")";
        case GraphKind::cycle: return "cycle(" + std::to_string(params_.size) + ")";
        case GraphKind::complete: return "complete(" + std::to_string(params_.size) + ")";
        case GraphKind::edge_pair: return "edge_pair";
        case GraphKind::empty: return "empty(" + std::to_string(params_.size) + ")";
    }
    return "graph";
}

Graph Graph::build(const GraphParams& p) {
    switch (p.kind) {
        case GraphKind::torus: return torus(p.dim, p.size);
        case GraphKind::tree_ball: return tree_ball(p.degree, p.depth);
        case GraphKind::cycle: return cycle(p.size);
        case GraphKind::complete: return complete(p.size);
        case GraphKind::edge_pair: return edge_pair();
        case GraphKind::empty: return empty(p.size);
    }
    throw std::invalid_argument("unhandled graph kind");
}

Graph Graph::torus(int dim, int side) {
    if (dim < 1) throw std::invalid_argument("torus dimension must be >= 1");
    if (side < 3) throw std::invalid_argument("torus side length must be >= 3");
    std::size_t n = 1;
    for (int i = 0; i < dim; ++i) {
        n *= static_cast<std::size_t>(side);
        if (n > (std::size_t{1} << 31)) throw std::invalid_argument("torus too large");
    }
    std::vector<std::vector<Vertex>> lists(n);
    for (std::size_t v = 0; v < n; ++v) {
        std::size_t stride = 1;
        for (int i = 0; i < dim; ++i) {
            std::size_t coord = (v / stride) % side;
            std::size_t up = coord + 1 == static_cast<std::size_t>(side) ? 0 : coord + 1;
            std::size_t down = coord == 0 ? side - 1 : coord - 1;
            lists[v].push_back(static_cast<Vertex>(v - coord * stride + up * stride));
            lists[v].push_back(static_cast<Vertex>(v - coord * stride + down * stride));
            stride *= side;
        }
    }
    GraphParams p{GraphKind::torus, dim, side, 2 * dim, 0};
    return Graph(p, std::move(lists), 2 * dim, {});
}

Graph Graph::tree_ball(int degree, int depth) {
    if (degree < 2) throw std::invalid_argument("tree degree must be >= 2");
    if (depth < 0) throw std::invalid_argument("tree depth must be >= 0");
    // Breadth-first labelling: root 0, then level by level.
    std::vector<std::vector<Vertex>> lists(1);
    std::vector<Vertex> frontier{0};
    for (int level = 0; level < depth; ++level) {
        std::vector<Vertex> next;
        for (Vertex parent : frontier) {
            int children = level == 0 ? degree : degree - 1;
            for (int c = 0; c < children; ++c) {
                auto child = static_cast<Vertex>(lists.size());
                lists.emplace_back();
                lists[parent].push_back(child);
                lists[child].push_back(parent);
                next.push_back(child);
            }
        }
        frontier = std::move(next);
        if (lists.size() > (std::size_t{1} << 28)) throw std::invalid_argument("tree ball too large");
    }
    GraphParams p{GraphKind::tree_ball, 0, 0, degree, depth};
    return Graph(p, std::move(lists), degree, std::move(frontier));
}

Graph Graph::cycle(int n) {
    if (n < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
    std::vector<std::vector<Vertex>> lists(n);
    for (int v = 0; v < n; ++v) {
        lists[v] = {static_cast<Vertex>((v + 1) % n), static_cast<Vertex>((v + n - 1) % n)};
        std::sort(lists[v].begin(), lists[v].end());
    }
    GraphParams p{GraphKind::cycle, 1, n, 2, 0};
    return Graph(p, std::move(lists), 2, {});
}

Graph Graph::complete(int n) {
    if (n < 2) throw std::invalid_argument("complete graph needs at least 2 vertices");
    std::vector<std::vector<Vertex>> lists(n);
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w)
            if (v != w) lists[v].push_back(static_cast<Vertex>(w));
    GraphParams p{GraphKind::complete, 0, n, n - 1, 0};
    return Graph(p, std::move(lists), n - 1, {});
}

Graph Graph::edge_pair() {
    GraphParams p{GraphKind::edge_pair, 0, 2, 1, 0};
    return Graph(p, {{1}, {0}}, 1, {});
}

Graph Graph::empty(int n) {
    if (n < 1) throw std::invalid_argument("empty graph needs at least 1 vertex");
    GraphParams p{GraphKind::empty, 0, n, 0, 0};
    return Graph(p, std::vector<std::vector<Vertex>>(n), 0, {});
}

DirectedEdges::DirectedEdges(const Graph& g) {
    const std::size_t m = g.directed_edge_count();
    source.reserve(m);
    target.reserve(m);
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        for (Vertex w : g.neighbors(v)) {
            source.push_back(v);
            target.push_back(w);
        }
    }
    reverse.assign(m, 0);
    for (std::size_t e = 0; e < m; ++e) {
        Vertex w = target[e];
        auto nb = g.neighbors(w);
        auto it = std::find(nb.begin(), nb.end(), source[e]);
        reverse[e] = static_cast<std::uint32_t>(g.adjacency_offset(w) + (it - nb.begin()));
    }
}

}  // namespace cpvl
