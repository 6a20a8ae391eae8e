#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leoemu/bbox.hpp"
#include "leoemu/constellation.hpp"

namespace leoemu {

struct HostConfig {
    std::string name;
    MachineResources capacity{};
    std::int64_t base_latency_us = 0;  // measured latency to peer hosts
};

/// Machines (shaping grammar names) that must land on the same host.
struct ColocationGroup {
    std::vector<std::string> members;
};

/// Everything a run needs, from the single configuration file.
struct EmulationConfig {
    double update_interval_s = 1.0;
    double duration_s = 0.0;
    std::optional<BoundingBox> bbox;
    std::vector<ShellConfig> shells;
    std::vector<GroundStationConfig> ground_stations;
    std::vector<HostConfig> hosts;
    std::vector<ColocationGroup> colocations;
};

struct ConfigParseResult {
    std::optional<EmulationConfig> config;  // engaged iff errors is empty
    std::vector<std::string> errors;        // all validation problems, not just the first

    bool ok() const { return errors.empty(); }
};

/// Parses and fully validates the TOML text: schema (unknown keys are
/// errors), value ranges, name uniqueness, colocation references.
ConfigParseResult parse_config(std::string_view toml_text);

ConfigParseResult load_config(const std::filesystem::path& path);

}  // namespace leoemu
