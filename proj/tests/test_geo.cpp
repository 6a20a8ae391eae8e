#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "leoemu/geo.hpp"

using namespace leoemu;
using namespace leoemu::constants;

namespace {

OrbitGeometry ring4() {
    OrbitGeometry o;
    o.planes = 1;
    o.sats_per_plane = 4;
    o.altitude_km = 550.0;
    o.inclination_deg = 0.0;
    o.arc_deg = 360.0;
    return o;
}

}  // namespace

TEST_CASE("circular propagation hits the analytic zero-angle positions") {
    const OrbitGeometry o = ring4();
    const double a = kEarthRadiusM + 550'000.0;

    const EciVector p0 = propagate_circular(o, 0, 0, {});
    CHECK(p0.x() == doctest::Approx(a).epsilon(1e-12));
    CHECK(p0.y() == doctest::Approx(0.0).scale(a));
    CHECK(p0.z() == doctest::Approx(0.0).scale(a));

    const EciVector p1 = propagate_circular(o, 0, 1, {});
    CHECK(p1.x() == doctest::Approx(0.0).scale(a));
    CHECK(p1.y() == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("propagation is periodic with the Kepler period") {
    // Oracle: closed-form period for a circular orbit, evaluated here
    // independently of orbital_period_s.
    const OrbitGeometry o = ring4();
    const double a = kEarthRadiusM + o.altitude_km * 1000.0;
    const double period = 2.0 * kPi * std::sqrt(a * a * a / kMuM3PerS2);
    CHECK(period == doctest::Approx(5.73e3).epsilon(0.01));
    CHECK(orbital_period_s(o) == doctest::Approx(period).epsilon(1e-12));

    const EciVector start = propagate_circular(o, 0, 0, {});
    const EciVector after = propagate_circular(o, 0, 0, {0.0, period});
    CHECK((after - start).norm() <= 1e-6 * a);
}

TEST_CASE("propagation radius is invariant over random shells and times") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> planes(1, 40), sats(1, 40), phase(0, 10);
    std::uniform_real_distribution<double> alt(300.0, 2000.0), incl(1.0, 180.0),
        arc(10.0, 360.0), time(0.0, 100'000.0);
    for (int i = 0; i < 200; ++i) {
        OrbitGeometry o;
        o.planes = planes(rng);
        o.sats_per_plane = sats(rng);
        o.altitude_km = alt(rng);
        o.inclination_deg = incl(rng);
        o.arc_deg = arc(rng);
        o.phase_offset = phase(rng);
        const int p = std::uniform_int_distribution<int>(0, o.planes - 1)(rng);
        const int k = std::uniform_int_distribution<int>(0, o.sats_per_plane - 1)(rng);
        const double a = orbit_radius_m(o);
        const double r = propagate_circular(o, p, k, {0.0, time(rng)}).norm();
        CHECK(std::abs(r - a) <= 1e-9 * a);
    }
}

TEST_CASE("out-of-range indices are rejected") {
    const OrbitGeometry o = ring4();
    CHECK_THROWS_AS(propagate_circular(o, 1, 0, {}), std::out_of_range);
    CHECK_THROWS_AS(propagate_circular(o, 0, 4, {}), std::out_of_range);
    CHECK_THROWS_AS(propagate_circular(o, -1, 0, {}), std::out_of_range);
}

TEST_CASE("geodetic conversion fixed points") {
    const EciVector origin = geodetic_to_eci({0.0, 0.0, 0.0}, {});
    CHECK(origin.x() == doctest::Approx(kEarthRadiusM));
    CHECK(origin.y() == doctest::Approx(0.0).scale(kEarthRadiusM));
    CHECK(origin.z() == doctest::Approx(0.0).scale(kEarthRadiusM));

    // The pole does not move as Earth rotates.
    for (double t : {0.0, 1234.5, 86'400.0}) {
        const EciVector pole = geodetic_to_eci({90.0, -45.0, 0.0}, {0.0, t});
        CHECK(pole.z() == doctest::Approx(kEarthRadiusM));
        CHECK(std::hypot(pole.x(), pole.y()) <= 1e-6 * kEarthRadiusM);
    }
}

TEST_CASE("a full sidereal rotation returns a ground point to its start") {
    // Oracle: one rotation takes exactly 2*pi / omega_e seconds.
    const double rotation = 2.0 * kPi / kEarthRotationRadPerS;
    const EciVector before = geodetic_to_eci({0.0, 0.0, 0.0}, {});
    const EciVector after = geodetic_to_eci({0.0, 0.0, 0.0}, {0.0, rotation});
    CHECK((after - before).norm() <= 1e-6 * kEarthRadiusM);
}

TEST_CASE("geodetic round trip through the inertial frame") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> lat(-89.9, 89.9), lon(-180.0, 179.99),
        alt(0.0, 2'000'000.0), time(0.0, 50'000.0);
    for (int i = 0; i < 200; ++i) {
        const GeodeticCoord g{lat(rng), lon(rng), alt(rng)};
        const SimTime t{0.0, time(rng)};
        const EciVector p = geodetic_to_eci(g, t);
        CHECK(p.norm() == doctest::Approx(kEarthRadiusM + g.alt_m).epsilon(1e-12));
        const GeodeticCoord back = eci_to_geodetic(p, t);
        CHECK(back.lat_deg == doctest::Approx(g.lat_deg).epsilon(1e-9));
        CHECK(std::abs(normalize_lon_deg(back.lon_deg - g.lon_deg)) <= 1e-7);
        CHECK(back.alt_m == doctest::Approx(g.alt_m).scale(kEarthRadiusM));
    }
}

TEST_CASE("propagation delay definition and linearity") {
    CHECK(propagation_delay_us(0.0) == 0.0);
    CHECK(propagation_delay_us(299'792.458) == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(propagation_delay_us(1'000'000.0) == doctest::Approx(3335.64).epsilon(1e-5));
    CHECK_THROWS_AS(propagation_delay_us(-1.0), std::invalid_argument);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(0.0, 1e8);
    for (int i = 0; i < 100; ++i) {
        const double d = dist(rng);
        CHECK(propagation_delay_us(2.0 * d) ==
              doctest::Approx(2.0 * propagation_delay_us(d)).epsilon(1e-12));
    }
}

TEST_CASE("longitude normalization lands in [-180, 180)") {
    CHECK(normalize_lon_deg(180.0) == -180.0);
    CHECK(normalize_lon_deg(-180.0) == -180.0);
    CHECK(normalize_lon_deg(540.0) == -180.0);
    CHECK(normalize_lon_deg(179.5) == doctest::Approx(179.5));
    CHECK(normalize_lon_deg(-181.0) == doctest::Approx(179.0));
}
