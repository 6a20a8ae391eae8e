#include "leoemu/bbox.hpp"

#include <algorithm>
#include <cmath>

#include "leoemu/config.hpp"

namespace leoemu {

bool in_bbox(const GeodeticCoord& g, const BoundingBox& box) {
    if (g.lat_deg < box.lat_min || g.lat_deg > box.lat_max) return false;
    const double lon = normalize_lon_deg(g.lon_deg);
    // A box crossing the antimeridian has lon_min > lon_max.
    if (box.lon_min <= box.lon_max) return lon >= box.lon_min && lon <= box.lon_max;
    return lon >= box.lon_min || lon <= box.lon_max;
}

ActivityPlan activity_plan(const TopologySnapshot& snapshot,
                           const std::optional<BoundingBox>& box) {
    ActivityPlan plan;
    plan.active.assign(snapshot.node_ids.size(), true);
    if (!box) return plan;
    const SimTime t{0.0, snapshot.frame_t_s};
    for (std::size_t i = 0; i < snapshot.node_ids.size(); ++i) {
        if (snapshot.node_ids[i].kind != NodeKind::Satellite) continue;
        GeodeticCoord sub = eci_to_geodetic(snapshot.positions[i], t);
        sub.alt_m = 0.0;  // activity is decided on the ground track
        plan.active[i] = in_bbox(sub, *box);
    }
    return plan;
}

ResourceEstimate estimate_peak_resources(const EmulationConfig& config,
                                         double safety_factor) {
    ResourceEstimate est;

    std::int64_t gst_vcpus = 0, gst_memory = 0;
    for (const auto& g : config.ground_stations) {
        gst_vcpus += g.machine.vcpus;
        gst_memory += g.machine.memory_mb;
    }

    std::int64_t total_sats = 0, total_sat_vcpus = 0, total_sat_memory = 0;
    for (const auto& s : config.shells) {
        const std::int64_t count = static_cast<std::int64_t>(s.planes) * s.sats_per_plane;
        total_sats += count;
        total_sat_vcpus += count * s.sat_machine.vcpus;
        total_sat_memory += count * s.sat_machine.memory_mb;
    }

    std::int64_t peak_sats = 0, peak_sat_vcpus = 0, peak_sat_memory = 0;
    if (!config.bbox) {
        // No suspension can ever happen, so the peak is exact.
        peak_sats = total_sats;
        peak_sat_vcpus = total_sat_vcpus;
        peak_sat_memory = total_sat_memory;
        safety_factor = 1.0;
    } else if (!config.shells.empty()) {
        double period = 0.0;
        for (const auto& s : config.shells) period = std::max(period, orbital_period_s(s));
        const auto samples =
            static_cast<std::int64_t>(std::floor(period / config.update_interval_s)) + 1;
        for (std::int64_t k = 0; k < samples; ++k) {
            const SimTime t{0.0, k * config.update_interval_s};
            std::int64_t sats = 0, vcpus = 0, memory = 0;
            for (std::size_t si = 0; si < config.shells.size(); ++si) {
                const auto& s = config.shells[si];
                for (int p = 0; p < s.planes; ++p) {
                    for (int slot = 0; slot < s.sats_per_plane; ++slot) {
                        GeodeticCoord sub = eci_to_geodetic(propagate_circular(s, p, slot, t), t);
                        sub.alt_m = 0.0;
                        if (in_bbox(sub, *config.bbox)) {
                            ++sats;
                            vcpus += s.sat_machine.vcpus;
                            memory += s.sat_machine.memory_mb;
                        }
                    }
                }
            }
            peak_sats = std::max(peak_sats, sats);
            peak_sat_vcpus = std::max(peak_sat_vcpus, vcpus);
            peak_sat_memory = std::max(peak_sat_memory, memory);
        }
    }

    // The safety factor covers sampling drift; it can never push the estimate
    // past the everything-active total.
    est.peak_active_machines =
        peak_sats + static_cast<std::int64_t>(config.ground_stations.size());
    est.required_vcpus =
        std::min(static_cast<std::int64_t>(std::ceil(peak_sat_vcpus * safety_factor)),
                 total_sat_vcpus) +
        gst_vcpus;
    est.required_memory_mb =
        std::min(static_cast<std::int64_t>(std::ceil(peak_sat_memory * safety_factor)),
                 total_sat_memory) +
        gst_memory;
    return est;
}

}  // namespace leoemu
