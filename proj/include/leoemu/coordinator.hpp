#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "leoemu/bbox.hpp"
#include "leoemu/config.hpp"
#include "leoemu/constellation.hpp"
#include "leoemu/netgraph.hpp"

namespace leoemu {

struct ActivityChange {
    std::uint32_t node = 0;
    bool active = true;

    friend bool operator==(const ActivityChange&, const ActivityChange&) = default;
};

/// What the coordinator sends every host agent each epoch. Epoch 0 (and
/// recovery updates) are full: `links` carries the complete topology and
/// `activity` one entry per node. Incremental updates carry `diffs` and only
/// the activity entries that changed.
struct EpochUpdate {
    double epoch_s = 0.0;
    bool full = false;
    std::vector<LinkState> links;        // full updates only
    std::vector<LinkDiff> diffs;         // incremental updates only
    std::vector<ActivityChange> activity;
};

/// Published epoch state: the snapshot plus the bounding-box activity plan.
struct EpochState {
    TopologySnapshot snapshot;
    ActivityPlan activity;
};

struct AssignmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HostAssignment {
    std::vector<int> host_of;  // node index -> host index
};

/// Distributes machines round-robin over hosts in NodeId order; colocation
/// groups land together on one host. Capacity is checked against the sum of
/// assigned machine resources unless over-provisioning is allowed.
/// Throws AssignmentError (no hosts, capacity exceeded, bad group).
HostAssignment assign_machines(const EmulationConfig& config, const Universe& universe,
                               bool allow_overprovision = false);

/// Single-writer epoch loop: propagate -> visibility -> latencies -> diffs ->
/// activity. Published EpochStates are immutable and may be read concurrently
/// with the writer advancing.
class Engine {
  public:
    explicit Engine(EmulationConfig config, double seed_epoch_s = 0.0);

    const EmulationConfig& config() const { return config_; }
    const Universe& universe() const { return universe_; }

    /// Number of epochs a full run executes: floor(duration / interval).
    std::int64_t total_epochs() const;

    /// Advances one epoch and returns the update for the host agents.
    /// Deterministic given (config, seed_epoch): same call sequence, same
    /// bytes.
    EpochUpdate step();

    /// Computes the topology at an arbitrary time without advancing the
    /// epoch loop (diff suppression does not apply).
    TopologySnapshot snapshot_at(double epoch_s) const { return compute_snapshot(epoch_s); }

    /// Full-topology update for the current epoch (agent recovery).
    EpochUpdate full_update() const;

    bool has_state() const { return state_ != nullptr; }
    const EpochState& current() const { return *state_; }
    std::shared_ptr<const EpochState> current_shared() const { return state_; }

    /// Lazy per-epoch all-pairs cache (Floyd-Warshall), computed on first
    /// request after a step. Single-writer: do not call concurrently with
    /// step().
    const AllPairs& all_pairs();

    /// Fault state: links touching a killed machine are emitted blocked from
    /// the next step until reboot.
    void set_killed(std::uint32_t node, bool killed);
    bool is_killed(std::uint32_t node) const;

  private:
    TopologySnapshot compute_snapshot(double epoch_s) const;

    EmulationConfig config_;
    double seed_epoch_s_ = 0.0;
    Universe universe_;
    std::int64_t next_epoch_index_ = 0;
    std::shared_ptr<const EpochState> state_;
    std::vector<bool> killed_;
    std::optional<AllPairs> all_pairs_;
};

// Coordinator->agent wire format: length-prefixed canonical JSON. The JSON
// object keys are sorted, link arrays are sorted by (a, b), latencies are
// integer microseconds; two identical runs produce identical bytes.

std::string update_to_wire(const EpochUpdate& update, const Universe& universe);
EpochUpdate update_from_wire(std::string_view payload, const Universe& universe);

/// Frames a payload with a 4-byte big-endian length prefix.
void write_frame(std::ostream& out, std::string_view payload);
/// Reads one frame; nothing at a clean EOF, throws std::runtime_error on a
/// truncated stream.
std::optional<std::string> read_frame(std::istream& in);

}  // namespace leoemu
