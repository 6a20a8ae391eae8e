#include "leoemu/run.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "leoemu/bbox.hpp"

namespace leoemu {

using nlohmann::json;

namespace {

std::string epoch_file_name(std::int64_t index) {
    std::ostringstream os;
    os << "epoch_" << std::setw(6) << std::setfill('0') << index << ".json";
    return os.str();
}

json node_record(const EpochState& state, const Universe& universe, std::uint32_t i) {
    const Node& node = universe.nodes[i];
    const GeodeticCoord g =
        eci_to_geodetic(state.snapshot.positions[i], SimTime{0.0, state.snapshot.frame_t_s});
    json rec{{"kind", node.is_satellite() ? "satellite" : "ground-station"},
             {"shell", nullptr},
             {"id", node.nid.id},
             {"name", node.name},
             {"lat_deg", g.lat_deg},
             {"lon_deg", g.lon_deg},
             {"alt_m", g.alt_m},
             {"x_m", state.snapshot.positions[i].x()},
             {"y_m", state.snapshot.positions[i].y()},
             {"z_m", state.snapshot.positions[i].z()},
             {"active", static_cast<bool>(state.activity.active[i])}};
    if (node.is_satellite()) rec["shell"] = node.nid.shell;
    return rec;
}

}  // namespace

std::string snapshot_to_json(const EpochState& state, const Universe& universe) {
    json nodes = json::array();
    for (std::uint32_t i = 0; i < universe.size(); ++i)
        nodes.push_back(node_record(state, universe, i));
    json links = json::array();
    for (const LinkState& l : state.snapshot.links)
        links.push_back(json{{"a", shaping_name(universe, l.a)},
                             {"b", shaping_name(universe, l.b)},
                             {"latency_us", l.latency_us},
                             {"bandwidth_kbps", l.bandwidth_kbps},
                             {"blocked", l.blocked}});
    const json doc{{"epoch_s", state.snapshot.epoch_s},
                   {"frame_t_s", state.snapshot.frame_t_s},
                   {"nodes", std::move(nodes)},
                   {"links", std::move(links)}};
    return doc.dump();
}

RunReport run_emulation(const EmulationConfig& config, const RunOptions& options) {
    namespace fs = std::filesystem;
    if (options.trace_dir.empty()) throw std::invalid_argument("trace directory not set");
    if (fs::exists(options.trace_dir) && !fs::is_empty(options.trace_dir))
        throw std::runtime_error("trace directory not empty: " + options.trace_dir.string());
    fs::create_directories(options.trace_dir / "snapshots");
    fs::create_directories(options.trace_dir / "hosts");

    Engine engine(config, options.seed_epoch_s);
    // Capacity is the validate command's gate; a run proceeds over-provisioned.
    const HostAssignment assignment =
        assign_machines(config, engine.universe(), /*allow_overprovision=*/true);

    std::vector<std::unique_ptr<TraceBackend>> backends;
    std::vector<std::unique_ptr<HostAgent>> agents;
    for (std::size_t h = 0; h < config.hosts.size(); ++h) {
        backends.push_back(std::make_unique<TraceBackend>(options.trace_dir / "hosts",
                                                          config.hosts[h].name));
        agents.push_back(std::make_unique<HostAgent>(static_cast<int>(h), engine.universe(),
                                                     assignment, config.hosts,
                                                     config.update_interval_s, *backends.back()));
    }

    std::ofstream stream(options.trace_dir / "updates.stream",
                         std::ios::binary | std::ios::trunc);
    if (!stream) throw std::runtime_error("cannot write updates.stream");

    RunReport report;
    report.epochs = engine.total_epochs();
    report.trace_dir = options.trace_dir.string();

    const auto run_start = std::chrono::steady_clock::now();
    for (std::int64_t k = 0; k < report.epochs; ++k) {
        if (options.realtime && k > 0) {
            const auto target = run_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                std::chrono::duration<double>(
                                                    k * config.update_interval_s));
            std::this_thread::sleep_until(target);
        }
        const auto step_start = std::chrono::steady_clock::now();

        const EpochUpdate update = engine.step();
        write_frame(stream, update_to_wire(update, engine.universe()));
        for (auto& agent : agents) agent->apply_update(update);

        const EpochState& state = engine.current();
        std::ofstream snap(options.trace_dir / "snapshots" / epoch_file_name(k),
                           std::ios::binary | std::ios::trunc);
        snap << snapshot_to_json(state, engine.universe()) << '\n';

        const auto active = static_cast<std::int64_t>(
            std::count(state.activity.active.begin(), state.activity.active.end(), true));
        report.peak_active_machines = std::max(report.peak_active_machines, active);
        report.step_durations_s.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - step_start)
                .count());
    }
    for (auto& backend : backends) backend->flush();
    stream.flush();
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
    for (const auto& agent : agents)
        report.shaping_warnings += static_cast<std::int64_t>(agent->warnings().size());

    json report_doc{{"epochs", report.epochs},
                    {"peak_active_machines", report.peak_active_machines},
                    {"shaping_warnings", report.shaping_warnings},
                    {"outputs",
                     json{{"updates", "updates.stream"},
                          {"snapshots", "snapshots"},
                          {"host_logs", "hosts"}}},
                    {"wall_time_s", report.wall_time_s},
                    {"step_durations_s", report.step_durations_s}};
    std::ofstream report_file(options.trace_dir / "report.json",
                              std::ios::binary | std::ios::trunc);
    report_file << report_doc.dump(2) << '\n';
    return report;
}

namespace {

// Shared by validate/run/inspect: parse, print problems, return config.
std::optional<EmulationConfig> load_or_report(const std::filesystem::path& path,
                                              std::ostream& out) {
    ConfigParseResult parsed = load_config(path);
    if (!parsed.ok()) {
        out << "configuration invalid (" << parsed.errors.size() << " error"
            << (parsed.errors.size() == 1 ? "" : "s") << "):\n";
        for (const auto& e : parsed.errors) out << "  " << e << "\n";
        return std::nullopt;
    }
    return std::move(parsed.config);
}

}  // namespace

int cmd_validate(const std::filesystem::path& config_path, bool allow_overprovision,
                 std::ostream& out) {
    auto config = load_or_report(config_path, out);
    if (!config) return 1;

    Universe universe = build_constellation(config->shells, config->ground_stations);
    try {
        assign_machines(*config, universe, /*allow_overprovision=*/true);
    } catch (const AssignmentError& e) {
        out << "configuration invalid: " << e.what() << "\n";
        return 1;
    }

    const ResourceEstimate estimate = estimate_peak_resources(*config);
    std::int64_t cap_vcpus = 0, cap_memory = 0;
    for (const auto& h : config->hosts) {
        cap_vcpus += h.capacity.vcpus;
        cap_memory += h.capacity.memory_mb;
    }

    out << "configuration valid: " << universe.satellite_count << " satellites, "
        << config->ground_stations.size() << " ground stations, " << config->hosts.size()
        << " hosts\n";
    out << "estimated peak: " << estimate.peak_active_machines << " active machines, "
        << estimate.required_vcpus << " vcpus, " << estimate.required_memory_mb << " MB\n";
    out << "declared capacity: " << cap_vcpus << " vcpus, " << cap_memory << " MB\n";

    const bool sufficient =
        estimate.required_vcpus <= cap_vcpus && estimate.required_memory_mb <= cap_memory;
    if (!sufficient) {
        if (allow_overprovision) {
            out << "capacity below estimate; continuing (over-provisioning allowed)\n";
            return 0;
        }
        out << "insufficient host capacity for the estimated peak\n";
        return 2;
    }
    out << "host capacity sufficient\n";
    return 0;
}

int cmd_run(const std::filesystem::path& config_path, const RunOptions& options,
            std::ostream& out) {
    auto config = load_or_report(config_path, out);
    if (!config) return 1;
    try {
        const RunReport report = run_emulation(*config, options);
        out << "ran " << report.epochs << " epochs in " << report.wall_time_s << " s (peak "
            << report.peak_active_machines << " active machines)\n";
        out << "trace written to " << report.trace_dir << "\n";
        if (report.shaping_warnings > 0)
            out << report.shaping_warnings << " shaping warnings (see agent logs)\n";
        return 0;
    } catch (const std::exception& e) {
        out << "run failed: " << e.what() << "\n";
        return 1;
    }
}

int cmd_inspect(const std::filesystem::path& config_path, double epoch_s,
                const std::string& src, const std::string& dst, std::ostream& out,
                double seed_epoch_s) {
    auto config = load_or_report(config_path, out);
    if (!config) return 1;

    Engine engine(*config, seed_epoch_s);
    std::optional<std::uint32_t> s, d;
    try {
        s = parse_node_ref(engine.universe(), src);
        d = parse_node_ref(engine.universe(), dst);
    } catch (const std::invalid_argument& e) {
        out << "error: " << e.what() << "\n";
        return 1;
    }
    if (!s || !d) {
        out << "error: unknown node '" << (!s ? src : dst) << "'\n";
        return 1;
    }

    const TopologySnapshot snapshot = engine.snapshot_at(epoch_s);
    const PathResult path = dijkstra(snapshot, *s, *d);
    out << "epoch " << epoch_s << " s, " << src << " -> " << dst << "\n";
    if (!path.reachable) {
        out << "unreachable\n";
        return 0;
    }
    out << "hops:";
    for (std::uint32_t h : path.hops) out << " " << shaping_name(engine.universe(), h);
    out << "\n";
    out << "latency_us: " << path.latency_us << "\n";
    out << "bandwidth_kbps: " << path.bandwidth_kbps << "\n";
    return 0;
}

namespace {

std::string csv_number(const json& v) {
    if (v.is_null()) return "";
    return v.dump();
}

}  // namespace

int cmd_export(const std::filesystem::path& trace_dir, const std::string& format,
               const std::filesystem::path& out_dir, std::ostream& out) {
    namespace fs = std::filesystem;
    if (format != "csv" && format != "jsonl") {
        out << "error: format must be csv or jsonl\n";
        return 1;
    }
    const fs::path snap_dir = trace_dir / "snapshots";
    std::vector<fs::path> snapshot_files;
    if (fs::is_directory(snap_dir))
        for (const auto& entry : fs::directory_iterator(snap_dir))
            if (entry.path().extension() == ".json") snapshot_files.push_back(entry.path());
    if (snapshot_files.empty()) {
        out << "error: no snapshots found under " << trace_dir << "\n";
        return 1;
    }
    std::sort(snapshot_files.begin(), snapshot_files.end());

    fs::create_directories(out_dir);
    const std::string ext = format == "csv" ? ".csv" : ".jsonl";
    std::ofstream nodes_out(out_dir / ("nodes" + ext), std::ios::binary | std::ios::trunc);
    std::ofstream links_out(out_dir / ("links" + ext), std::ios::binary | std::ios::trunc);

    if (format == "csv") {
        nodes_out << "epoch_s,kind,shell,id,name,lat_deg,lon_deg,alt_m,active\n";
        links_out << "epoch_s,a,b,latency_us,bandwidth_kbps,blocked\n";
    }

    std::int64_t node_records = 0, link_records = 0;
    for (const fs::path& file : snapshot_files) {
        std::ifstream in(file, std::ios::binary);
        json snap;
        try {
            in >> snap;
        } catch (const std::exception& e) {
            out << "error: cannot parse " << file << ": " << e.what() << "\n";
            return 1;
        }
        const json& epoch = snap.at("epoch_s");
        for (const json& n : snap.at("nodes")) {
            ++node_records;
            if (format == "jsonl") {
                const json rec{{"epoch_s", epoch},       {"kind", n.at("kind")},
                               {"shell", n.at("shell")}, {"id", n.at("id")},
                               {"name", n.at("name")},   {"lat_deg", n.at("lat_deg")},
                               {"lon_deg", n.at("lon_deg")}, {"alt_m", n.at("alt_m")},
                               {"active", n.at("active")}};
                nodes_out << rec.dump() << '\n';
            } else {
                nodes_out << epoch.dump() << ',' << n.at("kind").get<std::string>() << ','
                          << csv_number(n.at("shell")) << ',' << n.at("id").dump() << ','
                          << n.at("name").get<std::string>() << ','
                          << n.at("lat_deg").dump() << ',' << n.at("lon_deg").dump() << ','
                          << n.at("alt_m").dump() << ','
                          << (n.at("active").get<bool>() ? "true" : "false") << '\n';
            }
        }
        for (const json& l : snap.at("links")) {
            ++link_records;
            if (format == "jsonl") {
                const json rec{{"epoch_s", epoch},
                               {"a", l.at("a")},
                               {"b", l.at("b")},
                               {"latency_us", l.at("latency_us")},
                               {"bandwidth_kbps", l.at("bandwidth_kbps")},
                               {"blocked", l.at("blocked")}};
                links_out << rec.dump() << '\n';
            } else {
                links_out << epoch.dump() << ',' << l.at("a").get<std::string>() << ','
                          << l.at("b").get<std::string>() << ',' << l.at("latency_us").dump()
                          << ',' << l.at("bandwidth_kbps").dump() << ','
                          << (l.at("blocked").get<bool>() ? "true" : "false") << '\n';
            }
        }
    }
    out << "exported " << node_records << " node records and " << link_records
        << " link records from " << snapshot_files.size() << " epochs to " << out_dir << "\n";
    return 0;
}

}  // namespace leoemu
