#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "leoemu/addressing.hpp"
#include "leoemu/coordinator.hpp"

namespace leoemu {

enum class MachineState : std::uint8_t { Created, Active, Suspended, Killed };
enum class LifecycleAction : std::uint8_t { Boot, Suspend, Resume, Kill, Reboot };

const char* to_string(MachineState s);
const char* to_string(LifecycleAction a);

struct LifecycleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The 4-state machine lifecycle. Legal: created-boot, active-suspend,
/// active-kill, suspended-resume, suspended-kill, killed-reboot. Everything
/// else throws LifecycleError naming the state and action.
MachineState transition(MachineState state, LifecycleAction action);

struct MachineRecord {
    std::uint32_t node = 0;
    MachineResources resources{};
    IPv4Address address{};
    MachineState state = MachineState::Created;
    double vcpu_allocation = 0.0;  // degraded allocation; equals resources.vcpus when healthy
};

/// max(0, target - base). The caller records a warning when base exceeds the
/// target (the emulated link cannot be made faster than the real one).
std::int64_t compensate_host_latency(std::int64_t target_us, std::int64_t base_us);

/// Rounds microseconds half-up to 0.1 ms units.
std::int64_t quantize_delay_tenths_ms(std::int64_t delay_us);

/// Renders tenths of milliseconds with exactly one decimal digit ("13.4").
std::string format_delay_ms(std::int64_t delay_tenths_ms);

struct ShapingRule {
    std::int64_t delay_tenths_ms = 0;
    std::int64_t rate_kbps = 0;
    bool blocked = false;

    friend bool operator==(const ShapingRule&, const ShapingRule&) = default;
};

using ShapingCommand = std::string;

/// Where an agent's effects land. The trace backend records; a privileged
/// implementation could translate the same calls into tc/netem invocations.
class Backend {
  public:
    struct Capabilities {
        bool enforces_shaping = false;
        bool enforces_resources = false;
    };

    virtual ~Backend() = default;
    virtual void apply(double epoch_s, const ShapingCommand& command) = 0;
    virtual void resource_change(double epoch_s, const std::string& machine, double vcpus) = 0;
    virtual Capabilities capabilities() const = 0;
};

/// Appends "<epoch> <command>" lines to <dir>/<host>.shaping.log and resource
/// events to <dir>/<host>.events.log.
class TraceBackend : public Backend {
  public:
    TraceBackend(const std::filesystem::path& dir, const std::string& host_name);
    void apply(double epoch_s, const ShapingCommand& command) override;
    void resource_change(double epoch_s, const std::string& machine, double vcpus) override;
    Capabilities capabilities() const override { return {false, false}; }
    void flush();

  private:
    std::ofstream shaping_;
    std::ofstream events_;
};

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FaultEffect {
    std::uint32_t node = 0;
    std::string kind;
    MachineState new_state = MachineState::Created;
    double vcpu_allocation = 0.0;
    std::vector<ShapingCommand> commands;
};

/// One agent per host. Consumes the coordinator's update stream in epoch
/// order, keeps machine lifecycle for the machines assigned to its host, and
/// emits exactly the shaping commands that change state (sorted, idempotent).
class HostAgent {
  public:
    HostAgent(int host_index, const Universe& universe, const HostAssignment& assignment,
              const std::vector<HostConfig>& hosts, double update_interval_s,
              Backend& backend);

    /// Applies one update. Re-applying the last epoch is an idempotent no-op;
    /// any other out-of-order epoch raises ProtocolError and latches
    /// needs_full() until a full update arrives.
    std::vector<ShapingCommand> apply_update(const EpochUpdate& update);

    bool needs_full() const { return needs_full_; }
    double last_epoch_s() const { return static_cast<double>(last_epoch_index_) * update_interval_s_; }

    /// Direct lifecycle control (the runtime fault API).
    FaultEffect inject_kill(std::uint32_t node);
    FaultEffect inject_reboot(std::uint32_t node);
    FaultEffect inject_degrade(std::uint32_t node, double vcpu_fraction);

    bool manages(std::uint32_t node) const;
    const MachineRecord& machine(std::uint32_t node) const;
    const std::map<std::pair<std::uint32_t, std::uint32_t>, ShapingRule>& rules() const {
        return rules_;
    }
    const std::vector<std::string>& warnings() const { return warnings_; }

  private:
    MachineRecord& machine_mut(std::uint32_t node);
    void emit(std::vector<ShapingCommand>& out, const ShapingCommand& command);
    void reconcile_machines(std::vector<ShapingCommand>& out);
    void reconcile_links(std::vector<ShapingCommand>& out);
    std::int64_t base_latency_us(std::uint32_t a, std::uint32_t b, std::uint32_t src) const;

    const Universe& universe_;
    std::vector<int> host_of_;
    std::vector<std::int64_t> host_base_us_;
    int host_index_ = 0;
    double update_interval_s_ = 1.0;
    Backend* backend_ = nullptr;

    std::map<std::uint32_t, MachineRecord> machines_;  // local machines only
    std::map<std::uint32_t, bool> desired_active_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, LinkState> mirror_;  // local-relevant links
    std::map<std::pair<std::uint32_t, std::uint32_t>, ShapingRule> rules_;
    std::vector<std::string> warnings_;
    std::int64_t last_epoch_index_ = -1;
    double current_epoch_s_ = 0.0;
    bool needs_full_ = true;
};

}  // namespace leoemu
