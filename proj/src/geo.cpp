#include "leoemu/geo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace leoemu {

double normalize_lon_deg(double lon_deg) {
    double lon = std::fmod(lon_deg + 180.0, 360.0);
    if (lon < 0.0) lon += 360.0;
    return lon - 180.0;
}

double orbit_radius_m(const OrbitGeometry& orbit) {
    return constants::kEarthRadiusM + orbit.altitude_km * 1000.0;
}

double orbital_period_s(const OrbitGeometry& orbit) {
    const double a = orbit_radius_m(orbit);
    return 2.0 * kPi * std::sqrt(a * a * a / constants::kMuM3PerS2);
}

EciVector propagate_circular(const OrbitGeometry& orbit, int plane_idx, int sat_idx,
                             SimTime t) {
    if (plane_idx < 0 || plane_idx >= orbit.planes)
        throw std::out_of_range("plane index " + std::to_string(plane_idx) +
                                " outside shell with " + std::to_string(orbit.planes) +
                                " planes");
    if (sat_idx < 0 || sat_idx >= orbit.sats_per_plane)
        throw std::out_of_range("satellite index " + std::to_string(sat_idx) +
                                " outside plane with " +
                                std::to_string(orbit.sats_per_plane) + " slots");

    const double a = orbit_radius_m(orbit);
    const double mean_motion = std::sqrt(constants::kMuM3PerS2 / (a * a * a));
    const int total = orbit.planes * orbit.sats_per_plane;
    const double anomaly = 2.0 * kPi * sat_idx / orbit.sats_per_plane +
                           2.0 * kPi * orbit.phase_offset * plane_idx / total +
                           mean_motion * t.t_s;
    const double raan = deg_to_rad(plane_idx * orbit.arc_deg / orbit.planes);

    const Eigen::Vector3d in_plane(a * std::cos(anomaly), a * std::sin(anomaly), 0.0);
    return Eigen::AngleAxisd(raan, Eigen::Vector3d::UnitZ()) *
           (Eigen::AngleAxisd(deg_to_rad(orbit.inclination_deg), Eigen::Vector3d::UnitX()) *
            in_plane);
}

EciVector geodetic_to_eci(const GeodeticCoord& g, SimTime t) {
    const double r = constants::kEarthRadiusM + g.alt_m;
    const double lat = deg_to_rad(g.lat_deg);
    const double lon = deg_to_rad(g.lon_deg) + constants::kEarthRotationRadPerS * t.t_s;
    return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon),
            r * std::sin(lat)};
}

GeodeticCoord eci_to_geodetic(const EciVector& pos, SimTime t) {
    const double r = pos.norm();
    GeodeticCoord g;
    g.lat_deg = rad_to_deg(std::asin(pos.z() / r));
    const double lon_inertial = std::atan2(pos.y(), pos.x());
    g.lon_deg = normalize_lon_deg(
        rad_to_deg(lon_inertial - constants::kEarthRotationRadPerS * t.t_s));
    g.alt_m = r - constants::kEarthRadiusM;
    return g;
}

double propagation_delay_us(double distance_m) {
    if (distance_m < 0.0)
        throw std::invalid_argument("propagation distance must be non-negative");
    return distance_m / constants::kLightSpeedMPerS * 1e6;
}

}  // namespace leoemu
