#include "grpsis/network.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace grpsis {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), components_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t v) {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        parent_[b] = a;
        --components_;
    }

    std::size_t components() const { return components_; }

private:
    std::vector<std::size_t> parent_;
    std::size_t components_;
};

// Partially built graph: fixed-width adjacency rows with a fill count per node.
struct PartialGraph {
    PartialGraph(std::size_t n, std::size_t k) : k(k), adjacency(n * k), filled(n, 0) {}

    bool adjacent(NodeId u, NodeId v) const {
        const NodeId* row = adjacency.data() + static_cast<std::size_t>(u) * k;
        return std::find(row, row + filled[u], v) != row + filled[u];
    }

    void connect(NodeId u, NodeId v) {
        adjacency[static_cast<std::size_t>(u) * k + filled[u]++] = v;
        adjacency[static_cast<std::size_t>(v) * k + filled[v]++] = u;
    }

    std::size_t k;
    std::vector<NodeId> adjacency;
    std::vector<std::size_t> filled;
};

// One pairing pass. Returns false on a dead end (no admissible pair among remaining stubs).
bool pair_stubs(PartialGraph& graph, std::size_t n, std::size_t k, Rng& rng) {
    std::vector<NodeId> stubs;
    stubs.reserve(n * k);
    for (NodeId v = 0; v < n; ++v) stubs.insert(stubs.end(), k, v);

    std::size_t remaining = stubs.size();
    int misses = 0;
    while (remaining > 0) {
        std::size_t i = uniform_index(rng, remaining);
        std::size_t j = uniform_index(rng, remaining - 1);
        if (j >= i) ++j;
        const NodeId u = stubs[i];
        const NodeId v = stubs[j];
        if (u != v && !graph.adjacent(u, v)) {
            graph.connect(u, v);
            if (i < j) std::swap(i, j);
            stubs[i] = stubs[--remaining];
            stubs[j] = stubs[--remaining];
            misses = 0;
            continue;
        }
        if (++misses < 64) continue;
        // Many consecutive rejections: check whether any admissible pair is left at all.
        bool admissible = false;
        for (std::size_t a = 0; a < remaining && !admissible; ++a)
            for (std::size_t b = a + 1; b < remaining && !admissible; ++b)
                admissible = stubs[a] != stubs[b] && !graph.adjacent(stubs[a], stubs[b]);
        if (!admissible) return false;
        misses = 0;
    }
    return true;
}

} // namespace

RegularNetwork RegularNetwork::from_edges(std::size_t n, std::span<const Edge> edges) {
    if (n == 0) throw std::invalid_argument("network needs at least one node");
    if ((2 * edges.size()) % n != 0) throw std::invalid_argument("edge count is not compatible with a regular graph");
    const std::size_t k = 2 * edges.size() / n;
    PartialGraph graph(n, k);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self-loop in edge list");
        if (graph.filled[u] == k || graph.filled[v] == k) throw std::invalid_argument("edge list is not regular");
        if (graph.adjacent(u, v)) throw std::invalid_argument("duplicate edge in edge list");
        graph.connect(u, v);
    }
    return RegularNetwork(n, k, std::move(graph.adjacency));
}

std::vector<Edge> RegularNetwork::edges() const {
    std::vector<Edge> out;
    out.reserve(n_ * k_ / 2);
    for (NodeId u = 0; u < n_; ++u)
        for (NodeId v : neighbors(u))
            if (u < v) out.emplace_back(u, v);
    std::sort(out.begin(), out.end());
    return out;
}

bool RegularNetwork::connected() const {
    DisjointSets sets(n_);
    for (NodeId u = 0; u < n_; ++u)
        for (NodeId v : neighbors(u)) sets.unite(u, v);
    return sets.components() == 1;
}

RegularNetwork generate_regular(std::size_t n, std::size_t k, Rng& rng, const RegularGraphOptions& options) {
    if (k < 1) throw std::invalid_argument("degree must be at least 1");
    if (k >= n) throw std::invalid_argument("infeasible: degree k must be smaller than node count n");
    if ((n * k) % 2 != 0) throw std::invalid_argument("odd degree sum: n*k must be even");

    int rejections = 0;
    for (int restart = 0; restart <= options.max_restarts;) {
        PartialGraph graph(n, k);
        if (!pair_stubs(graph, n, k, rng)) {
            ++restart;
            continue;
        }
        RegularNetwork net(n, k, std::move(graph.adjacency));
        if (!options.require_connected || net.connected()) return net;
        if (++rejections > options.max_connectivity_rejections)
            throw std::runtime_error("no connected k-regular sample after " +
                                     std::to_string(options.max_connectivity_rejections) + " rejections");
    }
    throw std::runtime_error("stub pairing failed after " + std::to_string(options.max_restarts) + " restarts");
}

void write_edge_list(std::ostream& out, const RegularNetwork& net, std::uint64_t seed) {
    out << "# " << net.size() << ' ' << net.degree() << ' ' << seed << '\n';
    for (const auto& [u, v] : net.edges()) out << u << ' ' << v << '\n';
}

RegularNetwork read_edge_list(std::istream& in) {
    std::string line;
    std::size_t n = 0;
    std::size_t k = 0;
    bool have_header = false;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        if (line.front() == '#') {
            char hash = 0;
            std::uint64_t seed = 0;
            if (!have_header && (fields >> hash >> n >> k >> seed)) have_header = true;
            continue;
        }
        long long u = -1;
        long long v = -1;
        if (!(fields >> u >> v) || u < 0 || v < 0) throw std::invalid_argument("malformed edge line: '" + line + "'");
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    if (!have_header) throw std::invalid_argument("edge list is missing its '# n k seed' header");
    RegularNetwork net = RegularNetwork::from_edges(n, edges);
    if (net.degree() != k) throw std::invalid_argument("edge list degree does not match its header");
    return net;
}

} // namespace grpsis
