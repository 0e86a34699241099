#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace uqq {

enum class GraphFamily { ER, REG3, BA, WS };

std::string family_name(GraphFamily f);
GraphFamily family_from_name(const std::string& name);

/// Undirected, unweighted, simple graph. Edges are stored as (i, j) with
/// i < j, sorted lexicographically.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    GraphFamily family = GraphFamily::ER;
    std::uint64_t seed = 0;

    int m() const { return static_cast<int>(edges.size()); }
    std::vector<int> degrees() const;
    std::vector<std::vector<int>> adjacency_lists() const;
    bool connected() const;

    /// Validates the simple-graph invariants (0 <= i < j < n, no duplicates).
    void validate() const;
};

/// Builds a graph from an explicit edge list; normalizes orientation and
/// ordering, then validates.
Graph make_graph(int n, std::vector<std::pair<int, int>> edges);

/// Generates a connected random graph of the requested family with the
/// standard parameters: ER edge probability 0.5, BA attachment 2 from a
/// 2-vertex seed, WS ring degree 4 with rewiring probability 0.3, and
/// uniform simple 3-regular graphs via the pairing model. Regenerates with
/// an incremented sub-seed until connected (at most 1000 attempts).
Graph generate(GraphFamily family, int n, std::uint64_t seed);

/// Applies a vertex relabeling: vertex v of the input becomes perm[v].
Graph permute_graph(const Graph& g, const std::vector<int>& perm);

}  // namespace uqq
