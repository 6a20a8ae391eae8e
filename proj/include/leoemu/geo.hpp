#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace leoemu {

/// Earth-centered inertial position, meters. The frame is fixed at emulation
/// time zero; ground stations rotate through it at the sidereal rate.
using EciVector = Eigen::Vector3d;

namespace constants {
inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kMuM3PerS2 = 3.986004418e14;
inline constexpr double kLightSpeedMPerS = 299'792'458.0;
inline constexpr double kEarthRotationRadPerS = 7.2921159e-5;
}  // namespace constants

inline constexpr double kPi = 3.141592653589793238462643383279502884;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Normalizes a longitude into [-180, 180).
double normalize_lon_deg(double lon_deg);

/// Emulation clock. `t_s` is elapsed emulation time; `start_timestamp_s` is an
/// informational UTC reference and never enters any computation.
struct SimTime {
    double start_timestamp_s = 0.0;
    double t_s = 0.0;
};

struct GeodeticCoord {
    double lat_deg = 0.0;  // [-90, 90]
    double lon_deg = 0.0;  // [-180, 180)
    double alt_m = 0.0;    // >= 0
};

/// Orbital geometry of one shell: P planes spread over `arc_deg` of RAAN, S
/// satellites per plane spread evenly in anomaly, optional Walker-style
/// inter-plane phasing.
struct OrbitGeometry {
    int planes = 1;
    int sats_per_plane = 1;
    double altitude_km = 0.0;
    double inclination_deg = 0.0;
    double arc_deg = 360.0;
    int phase_offset = 0;
};

double orbit_radius_m(const OrbitGeometry& orbit);
double orbital_period_s(const OrbitGeometry& orbit);

/// Position of satellite (plane_idx, sat_idx) on its circular orbit at time t.
/// The norm of the result is exactly the orbit radius (up to rounding).
/// Throws std::out_of_range for indices outside the shell.
EciVector propagate_circular(const OrbitGeometry& orbit, int plane_idx, int sat_idx,
                             SimTime t);

/// Spherical-Earth conversion; the point co-rotates with Earth, so its
/// inertial longitude advances at the sidereal rate.
EciVector geodetic_to_eci(const GeodeticCoord& g, SimTime t);

/// Inverse of geodetic_to_eci at the same instant.
GeodeticCoord eci_to_geodetic(const EciVector& pos, SimTime t);

/// One-way vacuum light propagation delay in microseconds.
/// Throws std::invalid_argument for negative distances.
double propagation_delay_us(double distance_m);

}  // namespace leoemu
