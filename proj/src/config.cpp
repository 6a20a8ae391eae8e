#include "leoemu/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "leoemu/toml.hpp"

namespace leoemu {

namespace {

class Validator {
  public:
    std::vector<std::string> errors;

    void fail(int line, const std::string& msg) {
        errors.push_back("line " + std::to_string(line) + ": " + msg);
    }
    void fail(const std::string& msg) { errors.push_back(msg); }

    void check_known_keys(const toml::Table& t, const std::string& where,
                          const std::set<std::string>& known) {
        for (const auto& [key, value] : t.values)
            if (!known.contains(key))
                fail(value.line, where + ": unknown key '" + key + "'");
    }

    const toml::Value* require(const toml::Table& t, const std::string& where,
                               const std::string& key) {
        auto it = t.values.find(key);
        if (it == t.values.end()) {
            fail(t.line, where + ": missing required key '" + key + "'");
            return nullptr;
        }
        return &it->second;
    }

    std::optional<double> number(const toml::Table& t, const std::string& where,
                                 const std::string& key) {
        const toml::Value* v = require(t, where, key);
        if (!v) return std::nullopt;
        if (!v->is_number()) {
            fail(v->line, where + ": '" + key + "' must be a number");
            return std::nullopt;
        }
        return v->as_number();
    }

    std::optional<std::int64_t> integer(const toml::Table& t, const std::string& where,
                                        const std::string& key) {
        const toml::Value* v = require(t, where, key);
        if (!v) return std::nullopt;
        if (v->type != toml::Value::Type::Integer) {
            fail(v->line, where + ": '" + key + "' must be an integer");
            return std::nullopt;
        }
        return v->integer;
    }

    std::optional<std::string> string(const toml::Table& t, const std::string& where,
                                      const std::string& key) {
        const toml::Value* v = require(t, where, key);
        if (!v) return std::nullopt;
        if (v->type != toml::Value::Type::String) {
            fail(v->line, where + ": '" + key + "' must be a string");
            return std::nullopt;
        }
        return v->str;
    }

    // Optional variants: absent keys fall back to the default silently.
    std::int64_t integer_or(const toml::Table& t, const std::string& where,
                            const std::string& key, std::int64_t fallback) {
        auto it = t.values.find(key);
        if (it == t.values.end()) return fallback;
        if (it->second.type != toml::Value::Type::Integer) {
            fail(it->second.line, where + ": '" + key + "' must be an integer");
            return fallback;
        }
        return it->second.integer;
    }

    double number_or(const toml::Table& t, const std::string& where,
                     const std::string& key, double fallback) {
        auto it = t.values.find(key);
        if (it == t.values.end()) return fallback;
        if (!it->second.is_number()) {
            fail(it->second.line, where + ": '" + key + "' must be a number");
            return fallback;
        }
        return it->second.as_number();
    }

    template <typename T>
    void range(const toml::Table& t, const std::string& where, const std::string& key,
               std::optional<T> value, bool ok, const std::string& requirement) {
        if (value && !ok) {
            int line = t.values.contains(key) ? t.values.at(key).line : t.line;
            std::ostringstream os;
            os << "line " << line << ": " << where << ": '" << key << "' " << requirement
               << " (got " << *value << ")";
            errors.push_back(os.str());
        }
    }
};

ShellConfig parse_shell(Validator& v, const toml::Table& t, std::size_t index) {
    const std::string where = "shell " + std::to_string(index);
    v.check_known_keys(t, where,
                       {"planes", "sats_per_plane", "altitude_km", "inclination_deg",
                        "arc_deg", "phase_offset", "isl_bandwidth_kbps",
                        "min_isl_altitude_km", "sat_vcpus", "sat_memory_mb"});

    ShellConfig s;
    auto planes = v.integer(t, where, "planes");
    v.range(t, where, "planes", planes, !planes || *planes >= 1, "must be >= 1");
    if (planes) s.planes = static_cast<int>(*planes);

    auto sats = v.integer(t, where, "sats_per_plane");
    v.range(t, where, "sats_per_plane", sats, !sats || *sats >= 1, "must be >= 1");
    if (sats) s.sats_per_plane = static_cast<int>(*sats);

    auto alt = v.number(t, where, "altitude_km");
    v.range(t, where, "altitude_km", alt, !alt || *alt > 0, "must be > 0");
    if (alt) s.altitude_km = *alt;

    auto incl = v.number(t, where, "inclination_deg");
    v.range(t, where, "inclination_deg", incl, !incl || (*incl > 0 && *incl <= 180),
            "must be in (0, 180]");
    if (incl) s.inclination_deg = *incl;

    auto arc = v.number(t, where, "arc_deg");
    v.range(t, where, "arc_deg", arc, !arc || (*arc > 0 && *arc <= 360),
            "must be in (0, 360]");
    if (arc) s.arc_deg = *arc;

    const std::int64_t phase = v.integer_or(t, where, "phase_offset", 0);
    v.range<std::int64_t>(t, where, "phase_offset", phase, phase >= 0, "must be >= 0");
    s.phase_offset = static_cast<int>(phase);

    auto bw = v.integer(t, where, "isl_bandwidth_kbps");
    v.range(t, where, "isl_bandwidth_kbps", bw, !bw || *bw > 0, "must be > 0");
    if (bw) s.isl_bandwidth_kbps = *bw;

    const double min_alt = v.number_or(t, where, "min_isl_altitude_km", 80.0);
    v.range<double>(t, where, "min_isl_altitude_km", min_alt, min_alt >= 0, "must be >= 0");
    s.min_isl_altitude_km = min_alt;

    auto vcpus = v.integer(t, where, "sat_vcpus");
    v.range(t, where, "sat_vcpus", vcpus, !vcpus || *vcpus > 0, "must be > 0");
    if (vcpus) s.sat_machine.vcpus = static_cast<int>(*vcpus);

    auto mem = v.integer(t, where, "sat_memory_mb");
    v.range(t, where, "sat_memory_mb", mem, !mem || *mem > 0, "must be > 0");
    if (mem) s.sat_machine.memory_mb = *mem;

    return s;
}

GroundStationConfig parse_ground_station(Validator& v, const toml::Table& t,
                                         std::size_t index) {
    const std::string where = "ground_station " + std::to_string(index);
    v.check_known_keys(t, where,
                       {"name", "lat", "lon", "min_elevation_deg", "uplink_bandwidth_kbps",
                        "uplink_policy", "vcpus", "memory_mb"});

    GroundStationConfig g;
    if (auto name = v.string(t, where, "name")) {
        if (name->empty() || name->find('.') != std::string::npos ||
            name->find(' ') != std::string::npos)
            v.fail(t.line, where + ": 'name' must be non-empty without dots or spaces");
        g.name = *name;
    }

    auto lat = v.number(t, where, "lat");
    v.range(t, where, "lat", lat, !lat || (*lat >= -90 && *lat <= 90),
            "must be in [-90, 90]");
    if (lat) g.location.lat_deg = *lat;

    auto lon = v.number(t, where, "lon");
    v.range(t, where, "lon", lon, !lon || (*lon >= -180 && *lon <= 180),
            "must be in [-180, 180]");
    if (lon) g.location.lon_deg = normalize_lon_deg(*lon);

    auto elev = v.number(t, where, "min_elevation_deg");
    v.range(t, where, "min_elevation_deg", elev, !elev || (*elev >= 0 && *elev < 90),
            "must be in [0, 90)");
    if (elev) g.min_elevation_deg = *elev;

    auto bw = v.integer(t, where, "uplink_bandwidth_kbps");
    v.range(t, where, "uplink_bandwidth_kbps", bw, !bw || *bw > 0, "must be > 0");
    if (bw) g.uplink_bandwidth_kbps = *bw;

    if (auto policy = v.string(t, where, "uplink_policy")) {
        if (*policy == "all-visible")
            g.uplink_policy = UplinkPolicy::AllVisible;
        else if (*policy == "single-best")
            g.uplink_policy = UplinkPolicy::SingleBest;
        else
            v.fail(t.line, where + ": 'uplink_policy' must be \"all-visible\" or "
                           "\"single-best\"");
    }

    auto vcpus = v.integer(t, where, "vcpus");
    v.range(t, where, "vcpus", vcpus, !vcpus || *vcpus > 0, "must be > 0");
    if (vcpus) g.machine.vcpus = static_cast<int>(*vcpus);

    auto mem = v.integer(t, where, "memory_mb");
    v.range(t, where, "memory_mb", mem, !mem || *mem > 0, "must be > 0");
    if (mem) g.machine.memory_mb = *mem;

    return g;
}

HostConfig parse_host(Validator& v, const toml::Table& t, std::size_t index) {
    const std::string where = "host " + std::to_string(index);
    v.check_known_keys(t, where, {"name", "vcpus", "memory_mb", "base_latency_us"});

    HostConfig h;
    if (auto name = v.string(t, where, "name")) h.name = *name;

    auto vcpus = v.integer(t, where, "vcpus");
    v.range(t, where, "vcpus", vcpus, !vcpus || *vcpus > 0, "must be > 0");
    if (vcpus) h.capacity.vcpus = static_cast<int>(*vcpus);

    auto mem = v.integer(t, where, "memory_mb");
    v.range(t, where, "memory_mb", mem, !mem || *mem > 0, "must be > 0");
    if (mem) h.capacity.memory_mb = *mem;

    auto base = v.integer(t, where, "base_latency_us");
    v.range(t, where, "base_latency_us", base, !base || *base >= 0, "must be >= 0");
    if (base) h.base_latency_us = *base;

    return h;
}

// A colocation member is valid iff it names a machine that will exist.
bool machine_name_exists(const EmulationConfig& cfg, std::string_view name) {
    if (name.starts_with("gst.")) {
        const auto gst = name.substr(4);
        for (const auto& g : cfg.ground_stations)
            if (g.name == gst) return true;
        return false;
    }
    const auto dot = name.find('.');
    if (dot == std::string_view::npos) return false;
    int id = 0, shell = 0;
    try {
        std::size_t used = 0;
        id = std::stoi(std::string(name.substr(0, dot)), &used);
        if (used != dot) return false;
        const std::string rest(name.substr(dot + 1));
        shell = std::stoi(rest, &used);
        if (used != rest.size()) return false;
    } catch (...) {
        return false;
    }
    if (id < 0 || shell < 0 || shell >= static_cast<int>(cfg.shells.size())) return false;
    const auto& s = cfg.shells[static_cast<std::size_t>(shell)];
    return id < s.planes * s.sats_per_plane;
}

}  // namespace

ConfigParseResult parse_config(std::string_view toml_text) {
    ConfigParseResult result;
    toml::Document doc;
    try {
        doc = toml::parse(toml_text);
    } catch (const toml::ParseError& e) {
        result.errors.push_back(e.what());
        return result;
    }

    Validator v;
    EmulationConfig cfg;

    v.check_known_keys(doc.root, "top level", {"update_interval_s", "duration_s"});
    for (const auto& [name, table] : doc.tables)
        if (name != "bbox") v.fail(table.line, "unknown table [" + name + "]");
    for (const auto& [name, tables] : doc.table_arrays)
        if (name != "shell" && name != "ground_station" && name != "host" &&
            name != "colocate")
            v.fail(tables.front().line, "unknown table [[" + name + "]]");

    auto interval = v.number(doc.root, "top level", "update_interval_s");
    v.range(doc.root, "top level", "update_interval_s", interval, !interval || *interval > 0,
            "must be > 0");
    if (interval) cfg.update_interval_s = *interval;

    auto duration = v.number(doc.root, "top level", "duration_s");
    v.range(doc.root, "top level", "duration_s", duration, !duration || *duration > 0,
            "must be > 0");
    if (duration) cfg.duration_s = *duration;

    if (auto it = doc.tables.find("bbox"); it != doc.tables.end()) {
        const toml::Table& t = it->second;
        v.check_known_keys(t, "bbox", {"lat_min", "lat_max", "lon_min", "lon_max"});
        BoundingBox box;
        auto lat_min = v.number(t, "bbox", "lat_min");
        auto lat_max = v.number(t, "bbox", "lat_max");
        auto lon_min = v.number(t, "bbox", "lon_min");
        auto lon_max = v.number(t, "bbox", "lon_max");
        v.range(t, "bbox", "lat_min", lat_min, !lat_min || std::abs(*lat_min) <= 90,
                "must be in [-90, 90]");
        v.range(t, "bbox", "lat_max", lat_max, !lat_max || std::abs(*lat_max) <= 90,
                "must be in [-90, 90]");
        v.range(t, "bbox", "lon_min", lon_min, !lon_min || std::abs(*lon_min) <= 180,
                "must be in [-180, 180]");
        v.range(t, "bbox", "lon_max", lon_max, !lon_max || std::abs(*lon_max) <= 180,
                "must be in [-180, 180]");
        if (lat_min && lat_max && *lat_min > *lat_max)
            v.fail(t.line, "bbox: lat_min must not exceed lat_max");
        if (lat_min) box.lat_min = *lat_min;
        if (lat_max) box.lat_max = *lat_max;
        if (lon_min) box.lon_min = *lon_min;
        if (lon_max) box.lon_max = *lon_max;
        cfg.bbox = box;
    }

    if (auto it = doc.table_arrays.find("shell"); it != doc.table_arrays.end())
        for (std::size_t i = 0; i < it->second.size(); ++i)
            cfg.shells.push_back(parse_shell(v, it->second[i], i));

    if (auto it = doc.table_arrays.find("ground_station"); it != doc.table_arrays.end())
        for (std::size_t i = 0; i < it->second.size(); ++i)
            cfg.ground_stations.push_back(parse_ground_station(v, it->second[i], i));

    if (auto it = doc.table_arrays.find("host"); it != doc.table_arrays.end())
        for (std::size_t i = 0; i < it->second.size(); ++i)
            cfg.hosts.push_back(parse_host(v, it->second[i], i));

    if (auto it = doc.table_arrays.find("colocate"); it != doc.table_arrays.end()) {
        for (std::size_t i = 0; i < it->second.size(); ++i) {
            const toml::Table& t = it->second[i];
            const std::string where = "colocate " + std::to_string(i);
            v.check_known_keys(t, where, {"members"});
            ColocationGroup group;
            if (const toml::Value* members = v.require(t, where, "members")) {
                if (members->type != toml::Value::Type::Array) {
                    v.fail(members->line, where + ": 'members' must be an array of strings");
                } else {
                    for (const auto& m : members->array) {
                        if (m.type != toml::Value::Type::String)
                            v.fail(m.line, where + ": 'members' must contain strings");
                        else
                            group.members.push_back(m.str);
                    }
                }
            }
            cfg.colocations.push_back(std::move(group));
        }
    }

    if (cfg.shells.empty() && cfg.ground_stations.empty())
        v.fail("configuration must declare at least one shell or ground station");

    std::set<std::string> gst_names;
    for (const auto& g : cfg.ground_stations)
        if (!g.name.empty() && !gst_names.insert(g.name).second)
            v.fail("duplicate ground station name '" + g.name + "'");

    std::set<std::string> host_names;
    for (const auto& h : cfg.hosts)
        if (!h.name.empty() && !host_names.insert(h.name).second)
            v.fail("duplicate host name '" + h.name + "'");

    for (std::size_t i = 0; i < cfg.colocations.size(); ++i)
        for (const auto& member : cfg.colocations[i].members)
            if (!machine_name_exists(cfg, member))
                v.fail("colocate " + std::to_string(i) + ": unknown machine '" + member + "'");

    result.errors = std::move(v.errors);
    if (result.errors.empty()) result.config = std::move(cfg);
    return result;
}

ConfigParseResult load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ConfigParseResult r;
        r.errors.push_back("cannot read config file: " + path.string());
        return r;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace leoemu
