#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "leoemu/geo.hpp"
#include "leoemu/netgraph.hpp"

namespace leoemu {

struct EmulationConfig;

/// Geographic box limiting which satellite machines stay active.
/// lon_min > lon_max denotes an antimeridian wrap; containment is
/// boundary-inclusive.
struct BoundingBox {
    double lat_min = -90.0;
    double lat_max = 90.0;
    double lon_min = -180.0;
    double lon_max = 180.0;
};

bool in_bbox(const GeodeticCoord& g, const BoundingBox& box);

/// Per-node activity decision, dense-index aligned with the snapshot.
/// Ground stations are always active; a satellite is active iff its
/// sub-satellite point lies in the box. Never an input to path computation.
struct ActivityPlan {
    std::vector<bool> active;

    friend bool operator==(const ActivityPlan&, const ActivityPlan&) = default;
};

ActivityPlan activity_plan(const TopologySnapshot& snapshot,
                           const std::optional<BoundingBox>& box);

struct ResourceEstimate {
    std::int64_t peak_active_machines = 0;
    std::int64_t required_vcpus = 0;
    std::int64_t required_memory_mb = 0;
};

/// Pre-run host sizing: samples activity over one full orbital period of the
/// highest-altitude shell at the configured update interval and takes the
/// peak. Ground tracks precess, so the sampled period under-represents
/// long-term drift; the safety factor (applied to the satellite share of
/// vcpus/memory, not to the machine count) covers that.
ResourceEstimate estimate_peak_resources(const EmulationConfig& config,
                                         double safety_factor = 1.2);

}  // namespace leoemu
