#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "leoemu/agent.hpp"
#include "leoemu/config.hpp"
#include "leoemu/coordinator.hpp"

namespace leoemu {

struct RunOptions {
    bool realtime = false;  // pace steps to wall clock instead of as-fast-as-possible
    std::filesystem::path trace_dir;
    double seed_epoch_s = 0.0;
};

struct RunReport {
    std::int64_t epochs = 0;
    double wall_time_s = 0.0;
    std::vector<double> step_durations_s;
    std::int64_t peak_active_machines = 0;
    std::int64_t shaping_warnings = 0;
    std::string trace_dir;
};

/// Trace directory layout written by a run:
///   report.json                    RunReport (wall-time fields vary per run)
///   updates.stream                 length-prefixed wire updates, epoch order
///   snapshots/epoch_NNNNNN.json    per-epoch topology + activity
///   hosts/<host>.shaping.log       canonical shaping commands, epoch-prefixed
///   hosts/<host>.events.log        resource-change events
RunReport run_emulation(const EmulationConfig& config, const RunOptions& options);

// CLI entry points; each prints to `out` and returns the process exit code.

/// 0 valid and sufficient; 1 invalid; 2 valid but insufficient host capacity
/// (suppressed by allow_overprovision).
int cmd_validate(const std::filesystem::path& config_path, bool allow_overprovision,
                 std::ostream& out);

int cmd_run(const std::filesystem::path& config_path, const RunOptions& options,
            std::ostream& out);

int cmd_inspect(const std::filesystem::path& config_path, double epoch_s,
                const std::string& src, const std::string& dst, std::ostream& out,
                double seed_epoch_s = 0.0);

int cmd_export(const std::filesystem::path& trace_dir, const std::string& format,
               const std::filesystem::path& out_dir, std::ostream& out);

/// Canonical per-epoch snapshot document (also what snapshot files contain).
std::string snapshot_to_json(const EpochState& state, const Universe& universe);

}  // namespace leoemu
