#include "leoemu/coordinator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "json.hpp"

namespace leoemu {

HostAssignment assign_machines(const EmulationConfig& config, const Universe& universe,
                               bool allow_overprovision) {
    if (config.hosts.empty())
        throw AssignmentError("no hosts configured");
    const int host_count = static_cast<int>(config.hosts.size());
    const std::size_t n = universe.size();

    // Resolve colocation groups to node indices.
    std::vector<int> group_of(n, -1);
    for (std::size_t g = 0; g < config.colocations.size(); ++g) {
        for (const auto& member : config.colocations[g].members) {
            auto node = parse_node_ref(universe, member);
            if (!node)
                throw AssignmentError("colocation group names unknown machine '" + member +
                                      "'");
            if (group_of[*node] != -1 && group_of[*node] != static_cast<int>(g))
                throw AssignmentError("machine '" + member +
                                      "' appears in multiple colocation groups");
            group_of[*node] = static_cast<int>(g);
        }
    }

    HostAssignment assignment;
    assignment.host_of.assign(n, -1);
    std::vector<int> group_host(config.colocations.size(), -1);
    int rr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int g = group_of[i];
        if (g >= 0 && group_host[g] >= 0) {
            assignment.host_of[i] = group_host[g];
            continue;
        }
        const int host = rr++ % host_count;
        assignment.host_of[i] = host;
        if (g >= 0) group_host[g] = host;
    }

    if (!allow_overprovision) {
        std::vector<std::int64_t> vcpus(config.hosts.size(), 0), memory(config.hosts.size(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const Node& node = universe.nodes[i];
            const MachineResources& r =
                node.is_satellite() ? universe.shells[node.nid.shell].sat_machine
                                    : universe.ground_stations[node.gst_index].machine;
            vcpus[assignment.host_of[i]] += r.vcpus;
            memory[assignment.host_of[i]] += r.memory_mb;
        }
        for (std::size_t h = 0; h < config.hosts.size(); ++h) {
            if (vcpus[h] > config.hosts[h].capacity.vcpus ||
                memory[h] > config.hosts[h].capacity.memory_mb)
                throw AssignmentError(
                    "host '" + config.hosts[h].name + "' over capacity (" +
                    std::to_string(vcpus[h]) + " vcpus / " + std::to_string(memory[h]) +
                    " MB assigned); enable over-provisioning to accept");
        }
    }
    return assignment;
}

Engine::Engine(EmulationConfig config, double seed_epoch_s)
    : config_(std::move(config)),
      seed_epoch_s_(seed_epoch_s),
      universe_(build_constellation(config_.shells, config_.ground_stations)),
      killed_(universe_.size(), false) {}

std::int64_t Engine::total_epochs() const {
    // Tolerate non-representable decimal intervals (0.25 / 0.05 is 4.999...).
    return static_cast<std::int64_t>(
        std::floor(config_.duration_s / config_.update_interval_s + 1e-9));
}

TopologySnapshot Engine::compute_snapshot(double epoch_s) const {
    TopologySnapshot snap;
    snap.epoch_s = epoch_s;
    snap.frame_t_s = seed_epoch_s_ + epoch_s;
    const SimTime t{0.0, snap.frame_t_s};

    const std::size_t n = universe_.size();
    snap.node_ids.reserve(n);
    for (const Node& node : universe_.nodes) snap.node_ids.push_back(node.nid);

    snap.positions.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Node& node = universe_.nodes[i];
        snap.positions[i] =
            node.is_satellite()
                ? propagate_circular(universe_.shells[node.nid.shell], node.plane, node.slot, t)
                : geodetic_to_eci(universe_.ground_stations[node.gst_index].location, t);
    }

    auto blocked = [&](std::uint32_t a, std::uint32_t b) { return killed_[a] || killed_[b]; };

    for (const IslCandidate& c : universe_.isl_candidates) {
        const auto& shell = universe_.shells[c.shell];
        if (!isl_visible(snap.positions[c.a], snap.positions[c.b], shell.min_isl_altitude_km))
            continue;
        const double dist = (snap.positions[c.a] - snap.positions[c.b]).norm();
        snap.links.push_back({c.a, c.b, std::llround(propagation_delay_us(dist)),
                              shell.isl_bandwidth_kbps, blocked(c.a, c.b)});
    }

    const std::span<const EciVector> sat_positions(snap.positions.data(),
                                                   universe_.satellite_count);
    for (std::size_t g = 0; g < universe_.ground_stations.size(); ++g) {
        const auto& gst = universe_.ground_stations[g];
        const std::uint32_t gnode = universe_.gst_index(static_cast<int>(g));
        for (const GroundLink& gl : ground_links(gst, snap.positions[gnode], sat_positions)) {
            snap.links.push_back({gl.sat, gnode, std::llround(propagation_delay_us(gl.distance_m)),
                                  gst.uplink_bandwidth_kbps, blocked(gl.sat, gnode)});
        }
    }

    std::sort(snap.links.begin(), snap.links.end(),
              [](const LinkState& x, const LinkState& y) {
                  return std::pair{x.a, x.b} < std::pair{y.a, y.b};
              });
    return snap;
}

EpochUpdate Engine::step() {
    const double epoch_s = static_cast<double>(next_epoch_index_) * config_.update_interval_s;
    TopologySnapshot raw = compute_snapshot(epoch_s);

    EpochUpdate update;
    update.epoch_s = epoch_s;

    auto next = std::make_shared<EpochState>();
    if (next_epoch_index_ == 0) {
        update.full = true;
        next->snapshot = std::move(raw);
        next->activity = activity_plan(next->snapshot, config_.bbox);
        update.links = next->snapshot.links;
        update.activity.reserve(next->activity.active.size());
        for (std::uint32_t i = 0; i < next->activity.active.size(); ++i)
            update.activity.push_back({i, next->activity.active[i]});
    } else {
        update.full = false;
        update.diffs = diff_snapshots(state_->snapshot, raw);
        TopologySnapshot effective = std::move(raw);
        effective.links = apply_diffs(state_->snapshot.links, update.diffs);
        next->snapshot = std::move(effective);
        next->activity = activity_plan(next->snapshot, config_.bbox);
        for (std::uint32_t i = 0; i < next->activity.active.size(); ++i)
            if (next->activity.active[i] != state_->activity.active[i])
                update.activity.push_back({i, next->activity.active[i]});
    }

    state_ = std::move(next);
    ++next_epoch_index_;
    all_pairs_.reset();
    return update;
}

EpochUpdate Engine::full_update() const {
    if (!state_) throw std::logic_error("no epoch published yet");
    EpochUpdate update;
    update.epoch_s = state_->snapshot.epoch_s;
    update.full = true;
    update.links = state_->snapshot.links;
    for (std::uint32_t i = 0; i < state_->activity.active.size(); ++i)
        update.activity.push_back({i, state_->activity.active[i]});
    return update;
}

const AllPairs& Engine::all_pairs() {
    if (!state_) throw std::logic_error("no epoch published yet");
    if (!all_pairs_) all_pairs_ = floyd_warshall(state_->snapshot);
    return *all_pairs_;
}

void Engine::set_killed(std::uint32_t node, bool killed) { killed_.at(node) = killed; }

bool Engine::is_killed(std::uint32_t node) const { return killed_.at(node); }

namespace {

using nlohmann::json;

json link_to_json(const LinkState& l, const Universe& u) {
    return json{{"a", shaping_name(u, l.a)},
                {"b", shaping_name(u, l.b)},
                {"latency_us", l.latency_us},
                {"bandwidth_kbps", l.bandwidth_kbps},
                {"blocked", l.blocked}};
}

std::uint32_t node_from_json(const json& j, const Universe& u) {
    auto node = parse_node_ref(u, j.get<std::string>());
    if (!node) throw std::runtime_error("wire message names unknown node");
    return *node;
}

}  // namespace

std::string update_to_wire(const EpochUpdate& update, const Universe& universe) {
    json links = json::array();
    if (update.full) {
        for (const LinkState& l : update.links) links.push_back(link_to_json(l, universe));
    } else {
        for (const LinkDiff& d : update.diffs) {
            json entry{{"a", shaping_name(universe, d.a)},
                       {"b", shaping_name(universe, d.b)},
                       {"change", to_string(d.change)}};
            switch (d.change) {
                case LinkChange::Added:
                    entry["latency_us"] = d.state.latency_us;
                    entry["bandwidth_kbps"] = d.state.bandwidth_kbps;
                    entry["blocked"] = d.state.blocked;
                    break;
                case LinkChange::Removed: break;
                case LinkChange::LatencyChanged: entry["latency_us"] = d.state.latency_us; break;
                case LinkChange::BandwidthChanged:
                    entry["bandwidth_kbps"] = d.state.bandwidth_kbps;
                    break;
                case LinkChange::BlockedChanged: entry["blocked"] = d.state.blocked; break;
            }
            links.push_back(std::move(entry));
        }
    }

    json activity = json::array();
    for (const ActivityChange& a : update.activity)
        activity.push_back(json{{"node", shaping_name(universe, a.node)},
                                {"state", a.active ? "active" : "suspended"}});

    const json doc{{"epoch_s", update.epoch_s},
                   {"full", update.full},
                   {"links", std::move(links)},
                   {"activity", std::move(activity)}};
    return doc.dump();
}

EpochUpdate update_from_wire(std::string_view payload, const Universe& universe) {
    const json doc = json::parse(payload);
    EpochUpdate update;
    update.epoch_s = doc.at("epoch_s").get<double>();
    update.full = doc.at("full").get<bool>();

    for (const json& entry : doc.at("links")) {
        const std::uint32_t a = node_from_json(entry.at("a"), universe);
        const std::uint32_t b = node_from_json(entry.at("b"), universe);
        if (update.full) {
            update.links.push_back({a, b, entry.at("latency_us").get<std::int64_t>(),
                                    entry.at("bandwidth_kbps").get<std::int64_t>(),
                                    entry.at("blocked").get<bool>()});
            continue;
        }
        LinkDiff d;
        d.a = a;
        d.b = b;
        d.state.a = a;
        d.state.b = b;
        const std::string change = entry.at("change").get<std::string>();
        if (change == "added") {
            d.change = LinkChange::Added;
            d.state.latency_us = entry.at("latency_us").get<std::int64_t>();
            d.state.bandwidth_kbps = entry.at("bandwidth_kbps").get<std::int64_t>();
            d.state.blocked = entry.at("blocked").get<bool>();
        } else if (change == "removed") {
            d.change = LinkChange::Removed;
        } else if (change == "latency-changed") {
            d.change = LinkChange::LatencyChanged;
            d.state.latency_us = entry.at("latency_us").get<std::int64_t>();
        } else if (change == "bandwidth-changed") {
            d.change = LinkChange::BandwidthChanged;
            d.state.bandwidth_kbps = entry.at("bandwidth_kbps").get<std::int64_t>();
        } else if (change == "blocked-changed") {
            d.change = LinkChange::BlockedChanged;
            d.state.blocked = entry.at("blocked").get<bool>();
        } else {
            throw std::runtime_error("unknown link change kind '" + change + "'");
        }
        update.diffs.push_back(std::move(d));
    }

    for (const json& entry : doc.at("activity")) {
        const std::string state = entry.at("state").get<std::string>();
        if (state != "active" && state != "suspended")
            throw std::runtime_error("unknown activity state '" + state + "'");
        update.activity.push_back({node_from_json(entry.at("node"), universe),
                                   state == "active"});
    }
    return update;
}

void write_frame(std::ostream& out, std::string_view payload) {
    const auto size = static_cast<std::uint32_t>(payload.size());
    const unsigned char header[4] = {
        static_cast<unsigned char>((size >> 24) & 0xff),
        static_cast<unsigned char>((size >> 16) & 0xff),
        static_cast<unsigned char>((size >> 8) & 0xff),
        static_cast<unsigned char>(size & 0xff),
    };
    out.write(reinterpret_cast<const char*>(header), 4);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

std::optional<std::string> read_frame(std::istream& in) {
    unsigned char header[4];
    in.read(reinterpret_cast<char*>(header), 4);
    if (in.gcount() == 0 && in.eof()) return std::nullopt;
    if (in.gcount() != 4) throw std::runtime_error("truncated frame header");
    const std::uint32_t size = (static_cast<std::uint32_t>(header[0]) << 24) |
                               (static_cast<std::uint32_t>(header[1]) << 16) |
                               (static_cast<std::uint32_t>(header[2]) << 8) |
                               static_cast<std::uint32_t>(header[3]);
    std::string payload(size, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(size));
    if (in.gcount() != static_cast<std::streamsize>(size))
        throw std::runtime_error("truncated frame payload");
    return payload;
}

}  // namespace leoemu
