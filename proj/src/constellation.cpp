#include "leoemu/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <set>
#include <stdexcept>

namespace leoemu {

Universe build_constellation(std::vector<ShellConfig> shells,
                             std::vector<GroundStationConfig> ground_stations) {
    Universe u;
    u.shells = std::move(shells);
    u.ground_stations = std::move(ground_stations);

    for (std::size_t s = 0; s < u.shells.size(); ++s) {
        const auto& shell = u.shells[s];
        if (shell.planes < 1 || shell.sats_per_plane < 1)
            throw std::invalid_argument("shell " + std::to_string(s) +
                                        ": planes and sats_per_plane must be positive");
        u.shell_offsets.push_back(static_cast<std::uint32_t>(u.nodes.size()));
        for (int p = 0; p < shell.planes; ++p) {
            for (int k = 0; k < shell.sats_per_plane; ++k) {
                const int id = p * shell.sats_per_plane + k;
                Node n;
                n.nid = {NodeKind::Satellite, static_cast<int>(s), id};
                n.name = std::to_string(id) + "." + std::to_string(s);
                n.plane = p;
                n.slot = k;
                u.nodes.push_back(std::move(n));
            }
        }
    }
    u.satellite_count = static_cast<std::uint32_t>(u.nodes.size());

    for (std::size_t g = 0; g < u.ground_stations.size(); ++g) {
        Node n;
        n.nid = {NodeKind::GroundStation, 0, static_cast<int>(g)};
        n.name = u.ground_stations[g].name;
        n.gst_index = static_cast<int>(g);
        u.nodes.push_back(std::move(n));
    }

    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    auto add_candidate = [&](std::uint32_t a, std::uint32_t b, int shell) {
        if (a == b) return;  // degenerate rings (S == 1)
        if (a > b) std::swap(a, b);
        if (seen.insert({a, b}).second) u.isl_candidates.push_back({a, b, shell});
    };

    for (std::size_t s = 0; s < u.shells.size(); ++s) {
        const auto& shell = u.shells[s];
        const int P = shell.planes;
        const int S = shell.sats_per_plane;
        const bool wrap_planes = shell.arc_deg == 360.0;
        auto sat = [&](int p, int k) {
            return u.sat_index(static_cast<int>(s), p * S + k);
        };
        for (int p = 0; p < P; ++p) {
            for (int k = 0; k < S; ++k) {
                add_candidate(sat(p, k), sat(p, (k + 1) % S), static_cast<int>(s));
                if (p + 1 < P)
                    add_candidate(sat(p, k), sat(p + 1, k), static_cast<int>(s));
                else if (wrap_planes && P > 1)
                    add_candidate(sat(p, k), sat(0, k), static_cast<int>(s));
            }
        }
    }
    std::sort(u.isl_candidates.begin(), u.isl_candidates.end(),
              [](const IslCandidate& x, const IslCandidate& y) {
                  return std::pair{x.a, x.b} < std::pair{y.a, y.b};
              });
    return u;
}

bool isl_visible(const EciVector& a, const EciVector& b, double min_isl_altitude_km) {
    const double threshold = constants::kEarthRadiusM + min_isl_altitude_km * 1000.0;
    const Eigen::Vector3d d = b - a;
    const double len2 = d.squaredNorm();
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(-a.dot(d) / len2, 0.0, 1.0);
    return (a + t * d).norm() >= threshold;
}

double elevation_angle_deg(const EciVector& gst, const EciVector& sat) {
    const Eigen::Vector3d to_sat = sat - gst;
    const double range = to_sat.norm();
    if (range == 0.0)
        throw std::invalid_argument("elevation angle undefined for coincident positions");
    const double s = std::clamp(gst.normalized().dot(to_sat) / range, -1.0, 1.0);
    return rad_to_deg(std::asin(s));
}

std::vector<GroundLink> ground_links(const GroundStationConfig& gst,
                                     const EciVector& gst_pos,
                                     std::span<const EciVector> sat_positions) {
    std::vector<GroundLink> visible;
    for (std::uint32_t i = 0; i < sat_positions.size(); ++i) {
        const double elev = elevation_angle_deg(gst_pos, sat_positions[i]);
        if (elev >= gst.min_elevation_deg)
            visible.push_back({i, (sat_positions[i] - gst_pos).norm()});
    }
    if (gst.uplink_policy == UplinkPolicy::SingleBest && visible.size() > 1) {
        auto best = std::min_element(visible.begin(), visible.end(),
                                     [](const GroundLink& x, const GroundLink& y) {
                                         return std::pair{x.distance_m, x.sat} <
                                                std::pair{y.distance_m, y.sat};
                                     });
        return {*best};
    }
    return visible;
}

std::string shaping_name(const Universe& u, std::uint32_t node) {
    const Node& n = u.nodes[node];
    return n.is_satellite() ? n.name : "gst." + n.name;
}

std::string dns_name(const Universe& u, std::uint32_t node) {
    const Node& n = u.nodes[node];
    return n.is_satellite() ? n.name + ".celestial" : n.name + ".gst.celestial";
}

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && out >= 0;
}

std::optional<std::uint32_t> find_gst(const Universe& u, std::string_view name) {
    for (std::size_t g = 0; g < u.ground_stations.size(); ++g)
        if (u.ground_stations[g].name == name)
            return u.gst_index(static_cast<int>(g));
    return std::nullopt;
}

}  // namespace

std::optional<std::uint32_t> parse_node_ref(const Universe& u, std::string_view text) {
    if (text.ends_with(".celestial")) text.remove_suffix(10);
    const auto dot = text.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 >= text.size())
        throw std::invalid_argument("malformed node name: '" + std::string(text) + "'");
    const std::string_view first = text.substr(0, dot);
    const std::string_view second = text.substr(dot + 1);
    if (second.find('.') != std::string_view::npos)
        throw std::invalid_argument("malformed node name: '" + std::string(text) + "'");

    if (first == "gst") return find_gst(u, second);
    if (second == "gst") return find_gst(u, first);

    int id = 0, shell = 0;
    if (!parse_int(first, id) || !parse_int(second, shell))
        throw std::invalid_argument("malformed node name: '" + std::string(text) + "'");
    if (shell >= static_cast<int>(u.shells.size())) return std::nullopt;
    const auto& sc = u.shells[static_cast<std::size_t>(shell)];
    if (id >= sc.planes * sc.sats_per_plane) return std::nullopt;
    return u.sat_index(shell, id);
}

}  // namespace leoemu
