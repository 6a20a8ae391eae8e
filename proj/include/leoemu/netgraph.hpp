#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "leoemu/geo.hpp"
#include "leoemu/node.hpp"

namespace leoemu {

/// One undirected link at a snapshot epoch. Endpoints are dense node indices
/// (NodeId order) with a < b. Latency is integer microseconds so that path
/// sums, diffs, and the wire format are all exact.
struct LinkState {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::int64_t latency_us = 0;
    std::int64_t bandwidth_kbps = 0;
    bool blocked = false;

    friend bool operator==(const LinkState&, const LinkState&) = default;
};

/// Complete link state of the constellation at one epoch. Immutable once
/// built; any number of queries may run on it concurrently. `frame_t_s` is
/// the absolute simulation time the geometry was computed at (epoch plus
/// seed offset) and is what Earth-rotation conversions must use.
struct TopologySnapshot {
    double epoch_s = 0.0;
    double frame_t_s = 0.0;
    std::vector<NodeId> node_ids;       // dense index -> NodeId, sorted
    std::vector<EciVector> positions;   // parallel to node_ids
    std::vector<LinkState> links;       // sorted by (a, b), one per unordered pair
};

struct PathResult {
    std::vector<std::uint32_t> hops;  // node indices, source first
    std::int64_t latency_us = 0;
    std::int64_t bandwidth_kbps = 0;  // 0 when no link is traversed (src == dst)
    bool reachable = false;
};

inline constexpr std::int64_t kUnreachableUs = std::numeric_limits<std::int64_t>::max() / 4;

/// Adjacency over the non-blocked links of one snapshot; build once per
/// snapshot when running many queries.
struct Adjacency {
    struct Edge {
        std::uint32_t to;
        std::int64_t latency_us;
    };
    std::vector<std::vector<Edge>> edges;
};

Adjacency make_adjacency(const TopologySnapshot& snapshot);

/// Minimum-latency path over non-blocked links. Among equal-latency paths the
/// lexicographically smallest hop sequence (NodeId order) is returned.
/// src == dst yields a reachable single-hop result of latency 0.
/// Throws std::invalid_argument for unknown nodes.
PathResult dijkstra(const TopologySnapshot& snapshot, std::uint32_t src, std::uint32_t dst);
PathResult dijkstra(const Adjacency& adj, std::uint32_t src, std::uint32_t dst);

/// Minimum latencies from one source to every node (kUnreachableUs where
/// disconnected); the bulk form behind per-pair queries.
std::vector<std::int64_t> dijkstra_distances(const Adjacency& adj, std::uint32_t src);

/// All-pairs minimum latencies plus a next-hop matrix for path reconstruction.
/// Unreachable pairs carry kUnreachableUs / next hop -1.
struct AllPairs {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> latency_us;
    Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> next_hop;
};

AllPairs floyd_warshall(const TopologySnapshot& snapshot);

/// A minimum-latency hop sequence from the next-hop matrix; empty when
/// unreachable.
std::vector<std::uint32_t> reconstruct_path(const AllPairs& ap, std::uint32_t src,
                                            std::uint32_t dst);

/// Bottleneck bandwidth along a reachable path with at least one link.
/// Throws std::invalid_argument otherwise.
std::int64_t path_bandwidth(const PathResult& path, const TopologySnapshot& snapshot);

enum class LinkChange : std::uint8_t {
    Added = 0,
    Removed = 1,
    LatencyChanged = 2,
    BandwidthChanged = 3,
    BlockedChanged = 4,
};

const char* to_string(LinkChange change);

/// One element of the coordinator->host update protocol. For Added, `state`
/// is the full new link; for the *Changed kinds only the corresponding field
/// of `state` is meaningful.
struct LinkDiff {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    LinkChange change = LinkChange::Added;
    LinkState state{};

    friend bool operator==(const LinkDiff&, const LinkDiff&) = default;
};

/// Difference between two snapshots over the same node universe, sorted by
/// (a, b, change). Latency changes smaller than `suppress_below_us` are
/// dropped (pass 0 for an exact diff); the suppressed link keeps its previous
/// latency when the diff is applied. Throws std::invalid_argument when the
/// node universes differ.
std::vector<LinkDiff> diff_snapshots(const TopologySnapshot& prev,
                                     const TopologySnapshot& next,
                                     std::int64_t suppress_below_us = 50);

/// Applies a diff produced by diff_snapshots to the link set it was diffed
/// against.
std::vector<LinkState> apply_diffs(const std::vector<LinkState>& links,
                                   std::span<const LinkDiff> diffs);

}  // namespace leoemu
