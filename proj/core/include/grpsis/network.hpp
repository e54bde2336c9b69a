#pragma once

#include "grpsis/random.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace grpsis {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

struct RegularGraphOptions;

/// Simple undirected k-regular graph on nodes 0..n-1 with flat, array-indexed adjacency.
/// Immutable once built; safe to share across concurrent simulation runs.
class RegularNetwork {
public:
    /// Builds from an edge list and validates regularity, simplicity and symmetry.
    /// Throws std::invalid_argument if any invariant fails.
    static RegularNetwork from_edges(std::size_t n, std::span<const Edge> edges);

    std::size_t size() const noexcept { return n_; }
    std::size_t degree() const noexcept { return k_; }
    double mean_degree() const noexcept { return static_cast<double>(k_); }

    std::span<const NodeId> neighbors(NodeId v) const noexcept {
        return {adjacency_.data() + static_cast<std::size_t>(v) * k_, k_};
    }

    /// Edges as (u, v) with u < v, sorted.
    std::vector<Edge> edges() const;

    bool connected() const;

private:
    friend RegularNetwork generate_regular(std::size_t, std::size_t, Rng&, const RegularGraphOptions&);

    RegularNetwork(std::size_t n, std::size_t k, std::vector<NodeId> adjacency)
        : n_(n), k_(k), adjacency_(std::move(adjacency)) {}

    std::size_t n_ = 0;
    std::size_t k_ = 0;
    std::vector<NodeId> adjacency_;
};

struct RegularGraphOptions {
    bool require_connected = true;
    int max_restarts = 1000;           // pairing restarts after a dead end
    int max_connectivity_rejections = 100;
};

/// Random k-regular simple graph by stub pairing (configuration model) with rejection of
/// self-loops and multi-edges. Errors: "infeasible" when k >= n, "odd degree sum" when n*k is odd.
RegularNetwork generate_regular(std::size_t n, std::size_t k, Rng& rng, const RegularGraphOptions& options = {});

inline double mean_degree(const RegularNetwork& net) noexcept { return net.mean_degree(); }

/// Edge list text: header "# n k seed", then one "u v" line per edge with u < v.
void write_edge_list(std::ostream& out, const RegularNetwork& net, std::uint64_t seed);
RegularNetwork read_edge_list(std::istream& in);

} // namespace grpsis
