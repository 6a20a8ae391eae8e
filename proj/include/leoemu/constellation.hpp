#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leoemu/geo.hpp"
#include "leoemu/node.hpp"

namespace leoemu {

struct MachineResources {
    int vcpus = 1;
    std::int64_t memory_mb = 128;
};

enum class UplinkPolicy : std::uint8_t { AllVisible, SingleBest };

struct ShellConfig : OrbitGeometry {
    std::int64_t isl_bandwidth_kbps = 10'000'000;
    double min_isl_altitude_km = 80.0;
    MachineResources sat_machine{};
};

struct GroundStationConfig {
    std::string name;
    GeodeticCoord location;
    double min_elevation_deg = 0.0;  // [0, 90)
    std::int64_t uplink_bandwidth_kbps = 10'000'000;
    UplinkPolicy uplink_policy = UplinkPolicy::AllVisible;
    MachineResources machine{};
};

struct Node {
    NodeId nid;
    std::string name;  // "<id>.<shell>" for satellites, the station name otherwise
    // satellite payload
    int plane = 0;
    int slot = 0;
    // ground-station payload
    int gst_index = -1;

    bool is_satellite() const { return nid.kind == NodeKind::Satellite; }
};

/// Undirected +GRID ISL candidate, endpoints as node indices with a < b.
struct IslCandidate {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    int shell = 0;
};

/// The materialized node set of one configuration. Node indices are dense and
/// follow NodeId order exactly, so index comparisons are NodeId comparisons.
struct Universe {
    std::vector<ShellConfig> shells;
    std::vector<GroundStationConfig> ground_stations;
    std::vector<Node> nodes;
    std::vector<IslCandidate> isl_candidates;
    std::vector<std::uint32_t> shell_offsets;  // node index of each shell's satellite 0
    std::uint32_t satellite_count = 0;

    std::uint32_t sat_index(int shell, int id) const {
        return shell_offsets[static_cast<std::size_t>(shell)] +
               static_cast<std::uint32_t>(id);
    }
    std::uint32_t gst_index(int i) const {
        return satellite_count + static_cast<std::uint32_t>(i);
    }
    std::size_t size() const { return nodes.size(); }
};

/// Materializes shells and ground stations and derives the static +GRID ISL
/// candidate list: in-plane ring neighbors plus the equal-index satellite in
/// each adjacent plane; the plane ring only wraps for a full 360° arc.
/// Throws std::invalid_argument for non-positive plane/satellite counts.
Universe build_constellation(std::vector<ShellConfig> shells,
                             std::vector<GroundStationConfig> ground_stations);

/// True iff the segment [a, b] stays at or above min_isl_altitude_km over the
/// whole Earth (point-to-segment distance from the geocenter).
bool isl_visible(const EciVector& a, const EciVector& b, double min_isl_altitude_km);

/// Elevation of `sat` above the local horizon plane of `gst`, degrees in
/// [-90, 90]. Throws std::invalid_argument for coincident positions.
double elevation_angle_deg(const EciVector& gst, const EciVector& sat);

struct GroundLink {
    std::uint32_t sat = 0;  // node index of the satellite
    double distance_m = 0.0;
};

/// Satellites reachable from a ground station this epoch. `sat_positions`
/// spans all satellite node indices [0, satellite_count). Under SingleBest the
/// closest visible satellite is returned (ties to the smaller node index);
/// an empty result is a coverage gap, not an error.
std::vector<GroundLink> ground_links(const GroundStationConfig& gst,
                                     const EciVector& gst_pos,
                                     std::span<const EciVector> sat_positions);

// Node naming.
//
// Shaping grammar (trace logs, wire format, config colocation groups):
//   satellites "<id>.<shell>", ground stations "gst.<name>".
// DNS grammar (name resolution): "<id>.<shell>.celestial",
//   "<name>.gst.celestial" (the "gst.<name>.celestial" order is also accepted).
std::string shaping_name(const Universe& u, std::uint32_t node);
std::string dns_name(const Universe& u, std::uint32_t node);

/// Parses a node reference in either grammar, with or without the
/// ".celestial" suffix. Returns nothing for syntactically valid names of
/// machines that do not exist; throws std::invalid_argument on malformed input.
std::optional<std::uint32_t> parse_node_ref(const Universe& u, std::string_view text);

}  // namespace leoemu
