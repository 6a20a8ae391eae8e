#include "leoemu/info.hpp"

#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace leoemu {

using nlohmann::json;

std::string api_node_name(const Universe& universe, std::uint32_t node) {
    const Node& n = universe.nodes[node];
    return n.is_satellite() ? n.name : n.name + ".gst";
}

namespace {

json position_json(const TopologySnapshot& snap, std::uint32_t node) {
    const EciVector& pos = snap.positions[node];
    const GeodeticCoord g = eci_to_geodetic(pos, SimTime{0.0, snap.frame_t_s});
    return json{{"lat_deg", g.lat_deg}, {"lon_deg", g.lon_deg}, {"alt_m", g.alt_m},
                {"x_m", pos.x()},       {"y_m", pos.y()},       {"z_m", pos.z()}};
}

}  // namespace

struct InfoService::Impl {
    const Universe& universe;
    httplib::Server server;
    std::thread thread;
    mutable std::mutex mutex;
    std::shared_ptr<const EpochState> state;

    explicit Impl(const Universe& u) : universe(u) {}

    std::shared_ptr<const EpochState> snapshot() const {
        std::lock_guard lock(mutex);
        return state;
    }

    void reply(httplib::Response& res, int status, json body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    // Grabs one state for the whole request; nullptr means 503 already sent.
    std::shared_ptr<const EpochState> state_or_503(httplib::Response& res) {
        auto s = snapshot();
        if (!s) reply(res, 503, json{{"error", "no epoch published yet"}});
        return s;
    }

    void not_found(httplib::Response& res, const EpochState& st, const std::string& what) {
        reply(res, 404, json{{"epoch_s", st.snapshot.epoch_s}, {"error", what}});
    }

    void setup_routes() {
        server.Get("/info", [this](const httplib::Request&, httplib::Response& res) {
            auto st = state_or_503(res);
            if (!st) return;
            json shells = json::array();
            for (std::size_t s = 0; s < universe.shells.size(); ++s) {
                const ShellConfig& sc = universe.shells[s];
                shells.push_back(json{{"index", s},
                                      {"planes", sc.planes},
                                      {"sats_per_plane", sc.sats_per_plane},
                                      {"altitude_km", sc.altitude_km},
                                      {"inclination_deg", sc.inclination_deg},
                                      {"arc_deg", sc.arc_deg},
                                      {"phase_offset", sc.phase_offset},
                                      {"isl_bandwidth_kbps", sc.isl_bandwidth_kbps},
                                      {"min_isl_altitude_km", sc.min_isl_altitude_km},
                                      {"satellites", sc.planes * sc.sats_per_plane}});
            }
            json gsts = json::array();
            for (const auto& g : universe.ground_stations)
                gsts.push_back(json{{"name", g.name},
                                    {"lat_deg", g.location.lat_deg},
                                    {"lon_deg", g.location.lon_deg},
                                    {"min_elevation_deg", g.min_elevation_deg}});
            reply(res, 200,
                  json{{"epoch_s", st->snapshot.epoch_s},
                       {"shells", std::move(shells)},
                       {"ground_stations", std::move(gsts)},
                       {"satellites", universe.satellite_count},
                       {"nodes", universe.size()},
                       {"links", st->snapshot.links.size()}});
        });

        server.Get(R"(/shell/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto st = state_or_503(res);
            if (!st) return;
            const auto s = std::stoul(req.matches[1]);
            if (s >= universe.shells.size()) {
                not_found(res, *st, "unknown shell " + std::to_string(s));
                return;
            }
            const ShellConfig& sc = universe.shells[s];
            reply(res, 200,
                  json{{"epoch_s", st->snapshot.epoch_s},
                       {"index", s},
                       {"planes", sc.planes},
                       {"sats_per_plane", sc.sats_per_plane},
                       {"altitude_km", sc.altitude_km},
                       {"inclination_deg", sc.inclination_deg},
                       {"arc_deg", sc.arc_deg},
                       {"phase_offset", sc.phase_offset},
                       {"isl_bandwidth_kbps", sc.isl_bandwidth_kbps},
                       {"min_isl_altitude_km", sc.min_isl_altitude_km},
                       {"satellites", sc.planes * sc.sats_per_plane}});
        });

        server.Get(R"(/sat/(\d+)/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto st = state_or_503(res);
            if (!st) return;
            const auto shell = std::stoul(req.matches[1]);
            const auto id = std::stoul(req.matches[2]);
            if (shell >= universe.shells.size() ||
                id >= static_cast<unsigned long>(universe.shells[shell].planes *
                                                 universe.shells[shell].sats_per_plane)) {
                not_found(res, *st,
                          "unknown satellite " + std::to_string(id) + "." + std::to_string(shell));
                return;
            }
            const std::uint32_t node =
                universe.sat_index(static_cast<int>(shell), static_cast<int>(id));
            reply(res, 200,
                  json{{"epoch_s", st->snapshot.epoch_s},
                       {"name", universe.nodes[node].name},
                       {"shell", shell},
                       {"id", id},
                       {"active", static_cast<bool>(st->activity.active[node])},
                       {"position", position_json(st->snapshot, node)}});
        });

        server.Get(R"(/gst/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto st = state_or_503(res);
            if (!st) return;
            const std::string name = req.matches[1];
            std::uint32_t node = 0;
            bool found = false;
            for (std::size_t g = 0; g < universe.ground_stations.size(); ++g) {
                if (universe.ground_stations[g].name == name) {
                    node = universe.gst_index(static_cast<int>(g));
                    found = true;
                    break;
                }
            }
            if (!found) {
                not_found(res, *st, "unknown ground station '" + name + "'");
                return;
            }
            json uplinks = json::array();
            for (const LinkState& l : st->snapshot.links) {
                if (l.b != node) continue;  // ground links always have the station as b
                uplinks.push_back(json{{"sat", universe.nodes[l.a].name},
                                       {"latency_us", l.latency_us},
                                       {"bandwidth_kbps", l.bandwidth_kbps},
                                       {"blocked", l.blocked}});
            }
            reply(res, 200,
                  json{{"epoch_s", st->snapshot.epoch_s},
                       {"name", name},
                       {"active", true},
                       {"position", position_json(st->snapshot, node)},
                       {"uplinks", std::move(uplinks)}});
        });

        server.Get(R"(/path/([^/]+)/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto st = state_or_503(res);
            if (!st) return;
            std::optional<std::uint32_t> src, dst;
            try {
                src = parse_node_ref(universe, std::string(req.matches[1]));
                dst = parse_node_ref(universe, std::string(req.matches[2]));
            } catch (const std::invalid_argument& e) {
                not_found(res, *st, e.what());
                return;
            }
            if (!src || !dst) {
                not_found(res, *st, "unknown node");
                return;
            }
            const PathResult path = dijkstra(st->snapshot, *src, *dst);
            json hops = json::array();
            for (std::uint32_t h : path.hops) hops.push_back(api_node_name(universe, h));
            reply(res, 200,
                  json{{"epoch_s", st->snapshot.epoch_s},
                       {"src", api_node_name(universe, *src)},
                       {"dst", api_node_name(universe, *dst)},
                       {"reachable", path.reachable},
                       {"hops", std::move(hops)},
                       {"latency_us", path.latency_us},
                       {"bandwidth_kbps", path.bandwidth_kbps}});
        });
    }
};

InfoService::InfoService(const Universe& universe) : impl_(std::make_unique<Impl>(universe)) {
    impl_->setup_routes();
}

InfoService::~InfoService() { stop(); }

void InfoService::publish(std::shared_ptr<const EpochState> state) {
    std::lock_guard lock(impl_->mutex);
    impl_->state = std::move(state);
}

int InfoService::start(const std::string& host) {
    const int port = impl_->server.bind_to_any_port(host.c_str());
    if (port < 0) throw std::runtime_error("cannot bind info service on " + host);
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void InfoService::stop() {
    if (impl_->thread.joinable()) {
        impl_->server.stop();
        impl_->thread.join();
    }
}

}  // namespace leoemu
