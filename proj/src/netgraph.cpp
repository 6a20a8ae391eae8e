#include "leoemu/netgraph.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>

namespace leoemu {

Adjacency make_adjacency(const TopologySnapshot& snapshot) {
    Adjacency adj;
    adj.edges.resize(snapshot.node_ids.size());
    for (const LinkState& l : snapshot.links) {
        if (l.blocked) continue;
        adj.edges[l.a].push_back({l.b, l.latency_us});
        adj.edges[l.b].push_back({l.a, l.latency_us});
    }
    // Neighbor lists ascending so tie-breaking scans are ordered.
    for (auto& e : adj.edges)
        std::sort(e.begin(), e.end(), [](const Adjacency::Edge& x, const Adjacency::Edge& y) {
            return x.to < y.to;
        });
    return adj;
}

namespace {

std::vector<std::int64_t> shortest_distances(const Adjacency& adj, std::uint32_t src) {
    std::vector<std::int64_t> dist(adj.edges.size(), kUnreachableUs);
    using Item = std::pair<std::int64_t, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0;
    heap.push({0, src});
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d != dist[u]) continue;
        for (const auto& e : adj.edges[u]) {
            const std::int64_t nd = d + e.latency_us;
            if (nd < dist[e.to]) {
                dist[e.to] = nd;
                heap.push({nd, e.to});
            }
        }
    }
    return dist;
}

}  // namespace

std::vector<std::int64_t> dijkstra_distances(const Adjacency& adj, std::uint32_t src) {
    if (src >= adj.edges.size())
        throw std::invalid_argument("dijkstra: node index out of range");
    return shortest_distances(adj, src);
}

PathResult dijkstra(const Adjacency& adj, std::uint32_t src, std::uint32_t dst) {
    const auto n = adj.edges.size();
    if (src >= n || dst >= n)
        throw std::invalid_argument("dijkstra: node index out of range");

    PathResult result;
    if (src == dst) {
        result.hops = {src};
        result.reachable = true;
        return result;
    }

    const auto dist_src = shortest_distances(adj, src);
    if (dist_src[dst] >= kUnreachableUs) return result;
    const auto dist_dst = shortest_distances(adj, dst);
    const std::int64_t total = dist_src[dst];

    // Greedy walk over the shortest-path edge set: at each node take the
    // smallest-index neighbor still on some minimum-latency path. Prefixes of
    // shortest paths are shortest, so the walk always completes; the visited
    // guard only matters for zero-latency cycles (coincident nodes).
    result.hops.push_back(src);
    std::vector<char> visited(n, 0);
    visited[src] = 1;
    std::uint32_t u = src;
    std::size_t steps = 0;
    while (u != dst) {
        if (++steps > n)
            throw std::runtime_error("dijkstra: no simple lexicographic path "
                                     "(zero-latency cycle)");
        bool advanced = false;
        for (const auto& e : adj.edges[u]) {
            if (visited[e.to] && e.to != dst) continue;
            if (dist_src[u] + e.latency_us == dist_src[e.to] &&
                dist_src[u] + e.latency_us + dist_dst[e.to] == total) {
                u = e.to;
                visited[u] = 1;
                result.hops.push_back(u);
                advanced = true;
                break;
            }
        }
        if (!advanced)
            throw std::runtime_error("dijkstra: walk stuck (zero-latency cycle)");
    }

    result.latency_us = total;
    result.bandwidth_kbps = 0;
    result.reachable = true;
    return result;
}

PathResult dijkstra(const TopologySnapshot& snapshot, std::uint32_t src, std::uint32_t dst) {
    if (src >= snapshot.node_ids.size() || dst >= snapshot.node_ids.size())
        throw std::invalid_argument("dijkstra: node index out of range");
    PathResult r = dijkstra(make_adjacency(snapshot), src, dst);
    if (r.reachable && r.hops.size() >= 2) r.bandwidth_kbps = path_bandwidth(r, snapshot);
    return r;
}

AllPairs floyd_warshall(const TopologySnapshot& snapshot) {
    const auto n = static_cast<Eigen::Index>(snapshot.node_ids.size());
    AllPairs ap;
    ap.latency_us.setConstant(n, n, kUnreachableUs);
    ap.next_hop.setConstant(n, n, -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        ap.latency_us(i, i) = 0;
        ap.next_hop(i, i) = static_cast<std::int32_t>(i);
    }
    for (const LinkState& l : snapshot.links) {
        if (l.blocked) continue;
        if (l.latency_us < ap.latency_us(l.a, l.b)) {
            ap.latency_us(l.a, l.b) = l.latency_us;
            ap.latency_us(l.b, l.a) = l.latency_us;
            ap.next_hop(l.a, l.b) = static_cast<std::int32_t>(l.b);
            ap.next_hop(l.b, l.a) = static_cast<std::int32_t>(l.a);
        }
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::int64_t dik = ap.latency_us(i, k);
            if (dik >= kUnreachableUs) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                const std::int64_t dkj = ap.latency_us(k, j);
                if (dkj >= kUnreachableUs) continue;
                if (dik + dkj < ap.latency_us(i, j)) {
                    ap.latency_us(i, j) = dik + dkj;
                    ap.next_hop(i, j) = ap.next_hop(i, k);
                }
            }
        }
    }
    return ap;
}

std::vector<std::uint32_t> reconstruct_path(const AllPairs& ap, std::uint32_t src,
                                            std::uint32_t dst) {
    if (ap.next_hop(src, dst) < 0) return {};
    std::vector<std::uint32_t> hops{src};
    std::uint32_t u = src;
    while (u != dst) {
        u = static_cast<std::uint32_t>(ap.next_hop(u, dst));
        hops.push_back(u);
    }
    return hops;
}

namespace {

const LinkState* find_link(const TopologySnapshot& snapshot, std::uint32_t a,
                           std::uint32_t b) {
    if (a > b) std::swap(a, b);
    auto it = std::lower_bound(snapshot.links.begin(), snapshot.links.end(),
                               std::pair{a, b}, [](const LinkState& l, std::pair<std::uint32_t, std::uint32_t> key) {
                                   return std::pair{l.a, l.b} < key;
                               });
    if (it != snapshot.links.end() && it->a == a && it->b == b) return &*it;
    return nullptr;
}

}  // namespace

std::int64_t path_bandwidth(const PathResult& path, const TopologySnapshot& snapshot) {
    if (!path.reachable || path.hops.size() < 2)
        throw std::invalid_argument("path_bandwidth: path traverses no link");
    std::int64_t bw = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i + 1 < path.hops.size(); ++i) {
        const LinkState* l = find_link(snapshot, path.hops[i], path.hops[i + 1]);
        if (l == nullptr)
            throw std::invalid_argument("path_bandwidth: hop pair is not a link");
        bw = std::min(bw, l->bandwidth_kbps);
    }
    return bw;
}

const char* to_string(LinkChange change) {
    switch (change) {
        case LinkChange::Added: return "added";
        case LinkChange::Removed: return "removed";
        case LinkChange::LatencyChanged: return "latency-changed";
        case LinkChange::BandwidthChanged: return "bandwidth-changed";
        case LinkChange::BlockedChanged: return "blocked-changed";
    }
    return "?";
}

std::vector<LinkDiff> diff_snapshots(const TopologySnapshot& prev,
                                     const TopologySnapshot& next,
                                     std::int64_t suppress_below_us) {
    if (prev.node_ids != next.node_ids)
        throw std::invalid_argument("diff_snapshots: node universes differ");

    std::vector<LinkDiff> diffs;
    auto p = prev.links.begin();
    auto q = next.links.begin();
    while (p != prev.links.end() || q != next.links.end()) {
        if (q == next.links.end() ||
            (p != prev.links.end() && std::pair{p->a, p->b} < std::pair{q->a, q->b})) {
            diffs.push_back({p->a, p->b, LinkChange::Removed, {}});
            ++p;
        } else if (p == prev.links.end() || std::pair{q->a, q->b} < std::pair{p->a, p->b}) {
            diffs.push_back({q->a, q->b, LinkChange::Added, *q});
            ++q;
        } else {
            // Field changes carry only the changed value, matching the wire
            // encoding, so diffs round-trip through it unchanged.
            if (std::llabs(q->latency_us - p->latency_us) >= suppress_below_us &&
                q->latency_us != p->latency_us)
                diffs.push_back({q->a, q->b, LinkChange::LatencyChanged,
                                 {q->a, q->b, q->latency_us, 0, false}});
            if (q->bandwidth_kbps != p->bandwidth_kbps)
                diffs.push_back({q->a, q->b, LinkChange::BandwidthChanged,
                                 {q->a, q->b, 0, q->bandwidth_kbps, false}});
            if (q->blocked != p->blocked)
                diffs.push_back({q->a, q->b, LinkChange::BlockedChanged,
                                 {q->a, q->b, 0, 0, q->blocked}});
            ++p;
            ++q;
        }
    }
    return diffs;
}

std::vector<LinkState> apply_diffs(const std::vector<LinkState>& links,
                                   std::span<const LinkDiff> diffs) {
    std::vector<LinkState> out;
    out.reserve(links.size() + diffs.size());
    auto l = links.begin();
    auto d = diffs.begin();
    while (l != links.end() || d != diffs.end()) {
        if (d == diffs.end() ||
            (l != links.end() && std::pair{l->a, l->b} < std::pair{d->a, d->b})) {
            out.push_back(*l++);
            continue;
        }
        if (l == links.end() || std::pair{d->a, d->b} < std::pair{l->a, l->b}) {
            if (d->change != LinkChange::Added)
                throw std::invalid_argument("apply_diffs: change for absent link");
            out.push_back(d->state);
            ++d;
            continue;
        }
        // Same pair: fold every diff entry for it onto the existing link.
        LinkState cur = *l++;
        bool removed = false;
        for (; d != diffs.end() && d->a == cur.a && d->b == cur.b; ++d) {
            switch (d->change) {
                case LinkChange::Added:
                    throw std::invalid_argument("apply_diffs: added link already present");
                case LinkChange::Removed: removed = true; break;
                case LinkChange::LatencyChanged: cur.latency_us = d->state.latency_us; break;
                case LinkChange::BandwidthChanged:
                    cur.bandwidth_kbps = d->state.bandwidth_kbps;
                    break;
                case LinkChange::BlockedChanged: cur.blocked = d->state.blocked; break;
            }
        }
        if (!removed) out.push_back(cur);
    }
    return out;
}

}  // namespace leoemu
