#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cpvl {

using Vertex = std::uint32_t;

enum class GraphKind { torus, tree_ball, cycle, complete, edge_pair, empty };

std::string to_string(GraphKind kind);
GraphKind graph_kind_from_string(const std::string& name);

/// Construction parameters. Only the fields relevant to `kind` are read:
/// torus(dim, size), tree_ball(degree, depth), cycle(size), complete(size),
/// empty(size). edge_pair takes none.
struct GraphParams {
    GraphKind kind = GraphKind::cycle;
    int dim = 1;
    int size = 10;
    int degree = 3;
    int depth = 2;
};

/// Finite undirected simple graph stored as compressed adjacency lists.
/// Vertex 0 is the origin. Immutable after construction.
class Graph {
public:
    static Graph build(const GraphParams& params);

    static Graph torus(int dim, int side);
    static Graph tree_ball(int degree, int depth);
    static Graph cycle(int n);
    static Graph complete(int n);
    static Graph edge_pair();
    static Graph empty(int n);

    std::size_t vertex_count() const { return offsets_.size() - 1; }
    std::span<const Vertex> neighbors(Vertex v) const;
    std::size_t degree_of(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

    /// D for regular graphs; for tree balls the branching degree of the
    /// infinite tree being approximated.
    int degree() const { return degree_; }
    GraphKind kind() const { return params_.kind; }
    const GraphParams& params() const { return params_; }
    std::string describe() const;

    const std::vector<Vertex>& boundary_vertices() const { return boundary_; }
    bool is_boundary(Vertex v) const { return on_boundary_[v] != 0; }

    /// sup_n n^-1 log |sphere_n(origin)| over the realised sphere sizes.
    /// Pre-asymptotic on tori; diagnostic only.
    double growth_constant() const { return growth_constant_; }

    /// Breadth-first graph distance from `source` to every vertex
    /// (unreachable vertices get UINT32_MAX).
    std::vector<std::uint32_t> distances_from(Vertex source) const;

    /// Offset of v's first neighbour in the flattened adjacency array; the
    /// directed edge (v, neighbors(v)[k]) has id adjacency_offset(v) + k.
    std::size_t adjacency_offset(Vertex v) const { return offsets_[v]; }
    std::size_t directed_edge_count() const { return adjacency_.size(); }

private:
    Graph(GraphParams params, std::vector<std::vector<Vertex>> lists, int degree,
          std::vector<Vertex> boundary);

    GraphParams params_;
    std::vector<std::size_t> offsets_;
    std::vector<Vertex> adjacency_;
    int degree_ = 0;
    std::vector<Vertex> boundary_;
    std::vector<std::uint8_t> on_boundary_;
    double growth_constant_ = 0.0;
};

/// Flat view of the oriented edge set: edge e points from source[e] to
/// target[e]; reverse[e] is the id of (target[e], source[e]).
struct DirectedEdges {
    explicit DirectedEdges(const Graph& g);

    std::vector<Vertex> source;
    std::vector<Vertex> target;
    std::vector<std::uint32_t> reverse;

    std::size_t size() const { return source.size(); }
};

}  // namespace cpvl
