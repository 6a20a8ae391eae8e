#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "leoemu/agent.hpp"
#include "leoemu/config.hpp"
#include "leoemu/coordinator.hpp"

namespace testsupport {

inline std::filesystem::path source_dir() { return LEOEMU_SOURCE_DIR; }

inline std::filesystem::path config_path(const std::string& name) {
    return source_dir() / "configs" / name;
}

/// Fresh directory under the system temp root, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        path = base / (tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

/// Backend that keeps everything in memory.
class RecordingBackend : public leoemu::Backend {
  public:
    struct Event {
        double epoch_s;
        std::string machine;
        double vcpus;
    };
    std::vector<std::pair<double, std::string>> commands;
    std::vector<Event> events;

    void apply(double epoch_s, const leoemu::ShapingCommand& command) override {
        commands.push_back({epoch_s, command});
    }
    void resource_change(double epoch_s, const std::string& machine, double vcpus) override {
        events.push_back({epoch_s, machine, vcpus});
    }
    Capabilities capabilities() const override { return {false, false}; }
};

inline leoemu::ShellConfig make_shell(int planes, int sats, double alt_km, double incl_deg,
                                      double arc_deg = 360.0, int phase = 0) {
    leoemu::ShellConfig s;
    s.planes = planes;
    s.sats_per_plane = sats;
    s.altitude_km = alt_km;
    s.inclination_deg = incl_deg;
    s.arc_deg = arc_deg;
    s.phase_offset = phase;
    return s;
}

inline leoemu::GroundStationConfig make_gst(const std::string& name, double lat, double lon,
                                            double min_elev = 10.0,
                                            leoemu::UplinkPolicy policy =
                                                leoemu::UplinkPolicy::AllVisible) {
    leoemu::GroundStationConfig g;
    g.name = name;
    g.location = {lat, leoemu::normalize_lon_deg(lon), 0.0};
    g.min_elevation_deg = min_elev;
    g.uplink_policy = policy;
    return g;
}

/// One 12-satellite ring plus one station, spread over two hosts with a
/// 200 us inter-host base latency. Node 0 starts directly over the station;
/// round-robin puts even satellites and the station on host 0.
inline leoemu::EmulationConfig mini_config() {
    leoemu::EmulationConfig cfg;
    cfg.update_interval_s = 10.0;
    cfg.duration_s = 100.0;
    auto shell = make_shell(1, 12, 550.0, 53.0);
    shell.sat_machine = {2, 512};
    cfg.shells.push_back(shell);
    auto gst = make_gst("base", 0.0, 0.0, 0.0);
    gst.machine = {4, 4096};
    cfg.ground_stations.push_back(gst);
    cfg.hosts.push_back({"h0", {64, 65536}, 200});
    cfg.hosts.push_back({"h1", {64, 65536}, 200});
    return cfg;
}

}  // namespace testsupport
