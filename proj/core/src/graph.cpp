#include "uqq/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "uqq/rng.hpp"

namespace uqq {

std::string family_name(GraphFamily f) {
    switch (f) {
        case GraphFamily::ER: return "ER";
        case GraphFamily::REG3: return "REG3";
        case GraphFamily::BA: return "BA";
        case GraphFamily::WS: return "WS";
    }
    throw std::logic_error("unknown family");
}

GraphFamily family_from_name(const std::string& name) {
    if (name == "ER") return GraphFamily::ER;
    if (name == "REG3") return GraphFamily::REG3;
    if (name == "BA") return GraphFamily::BA;
    if (name == "WS") return GraphFamily::WS;
    throw std::invalid_argument("unknown graph family: " + name);
}

std::vector<int> Graph::degrees() const {
    std::vector<int> deg(n, 0);
    for (auto [i, j] : edges) {
        ++deg[i];
        ++deg[j];
    }
    return deg;
}

std::vector<std::vector<int>> Graph::adjacency_lists() const {
    std::vector<std::vector<int>> adj(n);
    for (auto [i, j] : edges) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    return adj;
}

bool Graph::connected() const {
    if (n == 0) return false;
    if (n == 1) return true;
    auto adj = adjacency_lists();
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u : adj[v]) {
            if (!seen[u]) {
                seen[u] = 1;
                ++visited;
                stack.push_back(u);
            }
        }
    }
    return visited == n;
}

void Graph::validate() const {
    if (n < 1) throw std::invalid_argument("graph must have at least one vertex");
    std::set<std::pair<int, int>> seen;
    for (auto [i, j] : edges) {
        if (i < 0 || j >= n || i >= j)
            throw std::invalid_argument("edge indices must satisfy 0 <= i < j < n");
        if (!seen.insert({i, j}).second)
            throw std::invalid_argument("duplicate edge");
    }
}

Graph make_graph(int n, std::vector<std::pair<int, int>> edges) {
    Graph g;
    g.n = n;
    for (auto& [i, j] : edges)
        if (i > j) std::swap(i, j);
    std::sort(edges.begin(), edges.end());
    g.edges = std::move(edges);
    g.validate();
    return g;
}

namespace {

Graph try_er(int n, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < 0.5) edges.emplace_back(i, j);
    return make_graph(n, std::move(edges));
}

// Pairing (configuration) model for simple 3-regular graphs; returns an
// empty optional-equivalent (n = 0) when the pairing produced a self-loop
// or multi-edge.
Graph try_reg3(int n, Rng& rng) {
    std::vector<int> stubs;
    stubs.reserve(3 * n);
    for (int v = 0; v < n; ++v)
        for (int c = 0; c < 3; ++c) stubs.push_back(v);
    rng.shuffle(stubs);
    std::set<std::pair<int, int>> edge_set;
    for (std::size_t i = 0; i < stubs.size(); i += 2) {
        int a = stubs[i], b = stubs[i + 1];
        if (a == b) return Graph{};
        if (a > b) std::swap(a, b);
        if (!edge_set.insert({a, b}).second) return Graph{};
    }
    return make_graph(n, {edge_set.begin(), edge_set.end()});
}

// Preferential attachment with m = 2 from a connected 2-vertex seed. Each
// new vertex attaches to two distinct targets sampled without replacement
// with probability proportional to degree.
Graph try_ba(int n, Rng& rng) {
    std::vector<std::pair<int, int>> edges{{0, 1}};
    std::vector<int> deg(n, 0);
    deg[0] = deg[1] = 1;
    for (int v = 2; v < n; ++v) {
        const int attach = std::min(2, v);
        std::vector<int> targets;
        while (static_cast<int>(targets.size()) < attach) {
            long total = 0;
            for (int u = 0; u < v; ++u) {
                if (std::find(targets.begin(), targets.end(), u) == targets.end())
                    total += deg[u];
            }
            double r = rng.uniform() * static_cast<double>(total);
            long acc = 0;
            int chosen = -1;
            for (int u = 0; u < v; ++u) {
                if (std::find(targets.begin(), targets.end(), u) != targets.end())
                    continue;
                acc += deg[u];
                if (r < static_cast<double>(acc)) {
                    chosen = u;
                    break;
                }
            }
            if (chosen < 0) chosen = v - 1;
            targets.push_back(chosen);
        }
        for (int u : targets) {
            edges.emplace_back(std::min(u, v), std::max(u, v));
            ++deg[u];
            ++deg[v];
        }
    }
    return make_graph(n, std::move(edges));
}

// Watts-Strogatz ring lattice of degree 4 with rewiring probability 0.3.
Graph try_ws(int n, Rng& rng) {
    std::set<std::pair<int, int>> edge_set;
    auto add = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        edge_set.insert({a, b});
    };
    for (int v = 0; v < n; ++v)
        for (int k = 1; k <= 2; ++k) add(v, (v + k) % n);

    for (int k = 1; k <= 2; ++k) {
        for (int v = 0; v < n; ++v) {
            int w = (v + k) % n;
            int a = std::min(v, w), b = std::max(v, w);
            if (!edge_set.count({a, b})) continue;  // already rewired away
            if (rng.uniform() < 0.3) {
                // pick a fresh endpoint for v, avoiding self-loops/duplicates
                int fresh = -1;
                for (int attempt = 0; attempt < 4 * n; ++attempt) {
                    int cand = static_cast<int>(rng.uniform_int(n));
                    if (cand == v) continue;
                    int ca = std::min(v, cand), cb = std::max(v, cand);
                    if (edge_set.count({ca, cb})) continue;
                    fresh = cand;
                    break;
                }
                if (fresh >= 0) {
                    edge_set.erase({a, b});
                    add(v, fresh);
                }
            }
        }
    }
    return make_graph(n, {edge_set.begin(), edge_set.end()});
}

}  // namespace

Graph generate(GraphFamily family, int n, std::uint64_t seed) {
    if (n < 4) throw std::invalid_argument("generate: n must be >= 4");
    if (family == GraphFamily::REG3 && n % 2 != 0)
        throw std::invalid_argument("generate: 3-regular graphs need even n");

    for (int attempt = 0; attempt < 1000; ++attempt) {
        Rng rng(derive_seed(seed, "graph-gen", static_cast<std::uint64_t>(attempt)));
        Graph g;
        switch (family) {
            case GraphFamily::ER: g = try_er(n, rng); break;
            case GraphFamily::REG3: g = try_reg3(n, rng); break;
            case GraphFamily::BA: g = try_ba(n, rng); break;
            case GraphFamily::WS: g = try_ws(n, rng); break;
        }
        if (g.n == n && g.connected()) {
            g.family = family;
            g.seed = seed;
            return g;
        }
    }
    throw std::runtime_error("generate: no connected graph after 1000 attempts");
}

Graph permute_graph(const Graph& g, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != g.n)
        throw std::invalid_argument("permute_graph: permutation size mismatch");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(g.edges.size());
    for (auto [i, j] : g.edges) edges.emplace_back(perm[i], perm[j]);
    Graph out = make_graph(g.n, std::move(edges));
    out.family = g.family;
    out.seed = g.seed;
    return out;
}

}  // namespace uqq
