#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "leoemu/config.hpp"
#include "leoemu/toml.hpp"
#include "support.hpp"

using namespace leoemu;

namespace {

bool any_error_contains(const ConfigParseResult& r, const std::string& needle) {
    return std::any_of(r.errors.begin(), r.errors.end(), [&](const std::string& e) {
        return e.find(needle) != std::string::npos;
    });
}

constexpr const char* kMinimal = R"(
update_interval_s = 5
duration_s = 60

[[shell]]
planes = 2
sats_per_plane = 3
altitude_km = 550
inclination_deg = 53
arc_deg = 360
isl_bandwidth_kbps = 10_000_000
sat_vcpus = 2
sat_memory_mb = 512

[[ground_station]]
name = "accra"
lat = 5.556
lon = -0.1969
min_elevation_deg = 25
uplink_bandwidth_kbps = 1000
uplink_policy = "all-visible"
vcpus = 4
memory_mb = 4096

[[host]]
name = "h0"
vcpus = 64
memory_mb = 65536
base_latency_us = 200
)";

}  // namespace

TEST_CASE("the iridium scenario file parses to 66 satellites") {
    const ConfigParseResult r = load_config(testsupport::config_path("iridium.toml"));
    REQUIRE_MESSAGE(r.ok(), (r.errors.empty() ? "" : r.errors.front()));
    const EmulationConfig& cfg = *r.config;
    REQUIRE(cfg.shells.size() == 1);
    CHECK(cfg.shells[0].planes * cfg.shells[0].sats_per_plane == 66);
    CHECK(cfg.shells[0].arc_deg == 180.0);
    CHECK(cfg.shells[0].inclination_deg == 90.0);
    CHECK(cfg.update_interval_s == 5.0);
    CHECK(cfg.duration_s == 900.0);
    CHECK(cfg.ground_stations.size() == 7);
    CHECK(cfg.hosts.size() == 4);
    CHECK(cfg.ground_stations[0].uplink_policy == UplinkPolicy::SingleBest);
}

TEST_CASE("the meetup scenario file parses to the five phase-one shells") {
    const ConfigParseResult r = load_config(testsupport::config_path("starlink_meetup.toml"));
    REQUIRE_MESSAGE(r.ok(), (r.errors.empty() ? "" : r.errors.front()));
    const EmulationConfig& cfg = *r.config;
    REQUIRE(cfg.shells.size() == 5);
    int total = 0;
    for (const auto& s : cfg.shells) total += s.planes * s.sats_per_plane;
    CHECK(total == 4409);
    REQUIRE(cfg.bbox.has_value());
    CHECK(cfg.colocations.size() == 1);
    CHECK(cfg.colocations[0].members.size() == 3);
}

TEST_CASE("minimal config round trip and defaults") {
    const ConfigParseResult r = parse_config(kMinimal);
    REQUIRE_MESSAGE(r.ok(), (r.errors.empty() ? "" : r.errors.front()));
    CHECK(r.config->shells[0].phase_offset == 0);          // default
    CHECK(r.config->shells[0].min_isl_altitude_km == 80.0);  // default
    CHECK_FALSE(r.config->bbox.has_value());
    CHECK(r.config->ground_stations[0].location.lon_deg == doctest::Approx(-0.1969));
}

TEST_CASE("a config without shells or stations is invalid") {
    const ConfigParseResult r = parse_config("update_interval_s = 1\nduration_s = 10\n");
    CHECK_FALSE(r.ok());
    CHECK(any_error_contains(r, "at least one shell or ground station"));
}

TEST_CASE("out-of-range values name the offending field") {
    std::string text = kMinimal;
    const auto pos = text.find("inclination_deg = 53");
    text.replace(pos, std::string("inclination_deg = 53").size(), "inclination_deg = 200");
    const ConfigParseResult r = parse_config(text);
    CHECK_FALSE(r.ok());
    CHECK(any_error_contains(r, "inclination_deg"));
    CHECK(any_error_contains(r, "(0, 180]"));
}

TEST_CASE("unknown keys and unknown tables are errors") {
    {
        std::string text = kMinimal;
        text += "\nmystery = 1\n";
        const ConfigParseResult r = parse_config(text);
        CHECK_FALSE(r.ok());
        CHECK(any_error_contains(r, "unknown key 'mystery'"));
    }
    {
        std::string text = kMinimal;
        text += "\n[[rocket]]\nthrust = 9000\n";
        const ConfigParseResult r = parse_config(text);
        CHECK_FALSE(r.ok());
        CHECK(any_error_contains(r, "[[rocket]]"));
    }
}

TEST_CASE("all validation errors are collected, not just the first") {
    std::string text = kMinimal;
    auto replace = [&](const std::string& from, const std::string& to) {
        const auto pos = text.find(from);
        REQUIRE(pos != std::string::npos);
        text.replace(pos, from.size(), to);
    };
    replace("planes = 2", "planes = 0");
    replace("min_elevation_deg = 25", "min_elevation_deg = 95");
    replace("base_latency_us = 200", "base_latency_us = -1");
    const ConfigParseResult r = parse_config(text);
    CHECK_FALSE(r.ok());
    CHECK(r.errors.size() >= 3);
    CHECK(any_error_contains(r, "planes"));
    CHECK(any_error_contains(r, "min_elevation_deg"));
    CHECK(any_error_contains(r, "base_latency_us"));
}

TEST_CASE("missing required keys are reported") {
    std::string text = kMinimal;
    const auto pos = text.find("altitude_km = 550\n");
    text.erase(pos, std::string("altitude_km = 550\n").size());
    const ConfigParseResult r = parse_config(text);
    CHECK_FALSE(r.ok());
    CHECK(any_error_contains(r, "missing required key 'altitude_km'"));
}

TEST_CASE("duplicate ground station names are rejected") {
    std::string text = kMinimal;
    text += R"(
[[ground_station]]
name = "accra"
lat = 1
lon = 1
min_elevation_deg = 10
uplink_bandwidth_kbps = 1000
uplink_policy = "single-best"
vcpus = 1
memory_mb = 128
)";
    const ConfigParseResult r = parse_config(text);
    CHECK_FALSE(r.ok());
    CHECK(any_error_contains(r, "duplicate ground station name 'accra'"));
}

TEST_CASE("colocation members must name existing machines") {
    std::string text = kMinimal;
    text += "\n[[colocate]]\nmembers = [\"gst.accra\", \"5.0\", \"gst.lagos\"]\n";
    const ConfigParseResult r = parse_config(text);
    CHECK_FALSE(r.ok());
    // 2x3 shell: satellite ids go up to 5, so "5.0" exists and only one error fires.
    CHECK(any_error_contains(r, "unknown machine 'gst.lagos'"));
    CHECK_FALSE(any_error_contains(r, "unknown machine '5.0'"));
}

TEST_CASE("bad uplink policies are rejected") {
    std::string text = kMinimal;
    const auto pos = text.find("\"all-visible\"");
    text.replace(pos, std::string("\"all-visible\"").size(), "\"strongest-signal\"");
    const ConfigParseResult r = parse_config(text);
    CHECK_FALSE(r.ok());
    CHECK(any_error_contains(r, "uplink_policy"));
}

TEST_CASE("bbox parses, including antimeridian wrap; inverted latitudes fail") {
    std::string text = kMinimal;
    text += "\n[bbox]\nlat_min = -10\nlat_max = 10\nlon_min = 170\nlon_max = -170\n";
    const ConfigParseResult r = parse_config(text);
    REQUIRE(r.ok());
    CHECK(r.config->bbox->lon_min == 170.0);
    CHECK(r.config->bbox->lon_max == -170.0);

    std::string bad = kMinimal;
    bad += "\n[bbox]\nlat_min = 30\nlat_max = 10\nlon_min = 0\nlon_max = 10\n";
    CHECK_FALSE(parse_config(bad).ok());
}

TEST_CASE("toml subset: syntax errors carry line numbers") {
    CHECK_THROWS_AS(toml::parse("key 5\n"), toml::ParseError);
    CHECK_THROWS_AS(toml::parse("a = 1\na = 2\n"), toml::ParseError);
    CHECK_THROWS_AS(toml::parse("a = \"unterminated\n"), toml::ParseError);
    try {
        toml::parse("ok = 1\nbroken =\n");
        FAIL("expected ParseError");
    } catch (const toml::ParseError& e) {
        CHECK(e.line == 2);
    }

    const toml::Document doc =
        toml::parse("n = 10_000 # comment\nf = 2.5\nb = true\ns = \"x # y\"\n");
    CHECK(doc.root.values.at("n").integer == 10'000);
    CHECK(doc.root.values.at("f").number == 2.5);
    CHECK(doc.root.values.at("b").boolean);
    CHECK(doc.root.values.at("s").str == "x # y");
}

TEST_CASE("a missing file reports an io error") {
    const ConfigParseResult r = load_config("/nonexistent/nowhere.toml");
    CHECK_FALSE(r.ok());
    CHECK(any_error_contains(r, "cannot read config file"));
}
