#include "leoemu/agent.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace leoemu {

const char* to_string(MachineState s) {
    switch (s) {
        case MachineState::Created: return "created";
        case MachineState::Active: return "active";
        case MachineState::Suspended: return "suspended";
        case MachineState::Killed: return "killed";
    }
    return "?";
}

const char* to_string(LifecycleAction a) {
    switch (a) {
        case LifecycleAction::Boot: return "boot";
        case LifecycleAction::Suspend: return "suspend";
        case LifecycleAction::Resume: return "resume";
        case LifecycleAction::Kill: return "kill";
        case LifecycleAction::Reboot: return "reboot";
    }
    return "?";
}

MachineState transition(MachineState state, LifecycleAction action) {
    switch (action) {
        case LifecycleAction::Boot:
            if (state == MachineState::Created) return MachineState::Active;
            break;
        case LifecycleAction::Suspend:
            if (state == MachineState::Active) return MachineState::Suspended;
            break;
        case LifecycleAction::Resume:
            if (state == MachineState::Suspended) return MachineState::Active;
            break;
        case LifecycleAction::Kill:
            if (state == MachineState::Active || state == MachineState::Suspended)
                return MachineState::Killed;
            break;
        case LifecycleAction::Reboot:
            if (state == MachineState::Killed) return MachineState::Active;
            break;
    }
    throw LifecycleError(std::string("illegal lifecycle transition: ") + to_string(action) +
                         " from state " + to_string(state));
}

std::int64_t compensate_host_latency(std::int64_t target_us, std::int64_t base_us) {
    return std::max<std::int64_t>(0, target_us - base_us);
}

std::int64_t quantize_delay_tenths_ms(std::int64_t delay_us) {
    return (delay_us + 50) / 100;
}

std::string format_delay_ms(std::int64_t delay_tenths_ms) {
    return std::to_string(delay_tenths_ms / 10) + "." + std::to_string(delay_tenths_ms % 10);
}

namespace {

std::string format_seconds(double s) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), s);
    return std::string(buf, end);
}

}  // namespace

TraceBackend::TraceBackend(const std::filesystem::path& dir, const std::string& host_name) {
    std::filesystem::create_directories(dir);
    shaping_.open(dir / (host_name + ".shaping.log"), std::ios::binary | std::ios::trunc);
    events_.open(dir / (host_name + ".events.log"), std::ios::binary | std::ios::trunc);
    if (!shaping_ || !events_)
        throw std::runtime_error("cannot open trace logs under " + dir.string());
}

void TraceBackend::apply(double epoch_s, const ShapingCommand& command) {
    shaping_ << format_seconds(epoch_s) << ' ' << command << '\n';
}

void TraceBackend::resource_change(double epoch_s, const std::string& machine, double vcpus) {
    events_ << format_seconds(epoch_s) << " resource " << machine << " vcpus "
            << format_seconds(vcpus) << '\n';
}

void TraceBackend::flush() {
    shaping_.flush();
    events_.flush();
}

HostAgent::HostAgent(int host_index, const Universe& universe,
                     const HostAssignment& assignment, const std::vector<HostConfig>& hosts,
                     double update_interval_s, Backend& backend)
    : universe_(universe),
      host_of_(assignment.host_of),
      host_index_(host_index),
      update_interval_s_(update_interval_s),
      backend_(&backend) {
    for (const HostConfig& h : hosts) host_base_us_.push_back(h.base_latency_us);
    for (std::uint32_t i = 0; i < universe.size(); ++i) {
        if (host_of_[i] != host_index) continue;
        const Node& node = universe.nodes[i];
        MachineRecord rec;
        rec.node = i;
        rec.resources = node.is_satellite()
                            ? universe.shells[node.nid.shell].sat_machine
                            : universe.ground_stations[node.gst_index].machine;
        rec.address = machine_address(i);
        rec.vcpu_allocation = rec.resources.vcpus;
        machines_.emplace(i, rec);
    }
}

bool HostAgent::manages(std::uint32_t node) const { return machines_.contains(node); }

const MachineRecord& HostAgent::machine(std::uint32_t node) const {
    auto it = machines_.find(node);
    if (it == machines_.end())
        throw UnknownMachineError("host " + std::to_string(host_index_) +
                                  " does not manage node " + std::to_string(node));
    return it->second;
}

MachineRecord& HostAgent::machine_mut(std::uint32_t node) {
    return const_cast<MachineRecord&>(machine(node));
}

void HostAgent::emit(std::vector<ShapingCommand>& out, const ShapingCommand& command) {
    backend_->apply(current_epoch_s_, command);
    out.push_back(command);
}

std::int64_t HostAgent::base_latency_us(std::uint32_t a, std::uint32_t b,
                                        std::uint32_t src) const {
    if (host_of_[a] == host_of_[b]) return 0;
    return host_base_us_[static_cast<std::size_t>(host_of_[src])];
}

std::vector<ShapingCommand> HostAgent::apply_update(const EpochUpdate& update) {
    const auto epoch_index =
        static_cast<std::int64_t>(std::llround(update.epoch_s / update_interval_s_));

    if (update.full) {
        mirror_.clear();
        for (const LinkState& l : update.links) {
            if (host_of_[l.a] == host_index_ || host_of_[l.b] == host_index_)
                mirror_[{l.a, l.b}] = l;
        }
        desired_active_.clear();
        for (const ActivityChange& a : update.activity)
            if (machines_.contains(a.node)) desired_active_[a.node] = a.active;
        last_epoch_index_ = epoch_index;
        needs_full_ = false;
    } else if (needs_full_) {
        throw ProtocolError("agent requires a full snapshot (epoch " +
                            format_seconds(update.epoch_s) + " is incremental)");
    } else if (epoch_index == last_epoch_index_) {
        // Idempotent re-delivery: state already reflects this epoch.
    } else if (epoch_index != last_epoch_index_ + 1) {
        needs_full_ = true;
        throw ProtocolError("out-of-order update: expected epoch index " +
                            std::to_string(last_epoch_index_ + 1) + ", got " +
                            std::to_string(epoch_index) + "; full snapshot required");
    } else {
        for (const LinkDiff& d : update.diffs) {
            if (host_of_[d.a] != host_index_ && host_of_[d.b] != host_index_) continue;
            const auto key = std::pair{d.a, d.b};
            switch (d.change) {
                case LinkChange::Added: mirror_[key] = d.state; break;
                case LinkChange::Removed: mirror_.erase(key); break;
                case LinkChange::LatencyChanged:
                    mirror_.at(key).latency_us = d.state.latency_us;
                    break;
                case LinkChange::BandwidthChanged:
                    mirror_.at(key).bandwidth_kbps = d.state.bandwidth_kbps;
                    break;
                case LinkChange::BlockedChanged:
                    mirror_.at(key).blocked = d.state.blocked;
                    break;
            }
        }
        for (const ActivityChange& a : update.activity)
            if (machines_.contains(a.node)) desired_active_[a.node] = a.active;
        last_epoch_index_ = epoch_index;
    }

    current_epoch_s_ = update.epoch_s;
    std::vector<ShapingCommand> out;
    reconcile_machines(out);
    reconcile_links(out);
    return out;
}

void HostAgent::reconcile_machines(std::vector<ShapingCommand>& out) {
    for (auto& [node, rec] : machines_) {
        auto want = desired_active_.find(node);
        if (want == desired_active_.end()) continue;
        const std::string name = shaping_name(universe_, node);
        if (rec.state == MachineState::Created) {
            rec.state = transition(rec.state, LifecycleAction::Boot);
            emit(out, "machine " + name + " boot");
        }
        if (rec.state == MachineState::Active && !want->second) {
            rec.state = transition(rec.state, LifecycleAction::Suspend);
            emit(out, "machine " + name + " suspend");
        } else if (rec.state == MachineState::Suspended && want->second) {
            rec.state = transition(rec.state, LifecycleAction::Resume);
            emit(out, "machine " + name + " resume");
        }
        // Killed machines ignore activity until rebooted.
    }
}

void HostAgent::reconcile_links(std::vector<ShapingCommand>& out) {
    struct Desired {
        ShapingRule rule;
        bool clamped = false;
        std::int64_t target_us = 0;
        std::int64_t base_us = 0;
    };
    std::map<std::pair<std::uint32_t, std::uint32_t>, Desired> desired;

    for (const auto& [key, link] : mirror_) {
        for (const auto [src, dst] : {std::pair{link.a, link.b}, std::pair{link.b, link.a}}) {
            if (host_of_[src] != host_index_) continue;
            Desired d;
            d.base_us = base_latency_us(link.a, link.b, src);
            d.target_us = link.latency_us;
            d.clamped = d.base_us > d.target_us;
            d.rule = {quantize_delay_tenths_ms(compensate_host_latency(d.target_us, d.base_us)),
                      link.bandwidth_kbps, link.blocked};
            desired[{src, dst}] = d;
        }
    }
    // Links gone from the topology stay as blocked rules: unblocking later is
    // one command and the log replays to the same traffic-passing state.
    for (const auto& [key, rule] : rules_) {
        if (desired.contains(key)) continue;
        Desired ghost;
        ghost.rule = rule;
        ghost.rule.blocked = true;
        desired[key] = ghost;
    }

    for (const auto& [key, d] : desired) {
        const std::string src = shaping_name(universe_, key.first);
        const std::string dst = shaping_name(universe_, key.second);
        auto it = rules_.find(key);
        const bool is_new = it == rules_.end();
        const bool set_changed = is_new || it->second.delay_tenths_ms != d.rule.delay_tenths_ms ||
                                 it->second.rate_kbps != d.rule.rate_kbps;
        if (set_changed) {
            emit(out, "link set " + src + " " + dst + " delay " +
                          format_delay_ms(d.rule.delay_tenths_ms) + "ms rate " +
                          std::to_string(d.rule.rate_kbps) + "kbit");
            if (d.clamped)
                warnings_.push_back("link " + src + " -> " + dst + ": host base latency " +
                                    std::to_string(d.base_us) +
                                    "us exceeds target latency " +
                                    std::to_string(d.target_us) + "us; emitting 0");
        }
        if ((is_new && d.rule.blocked) || (!is_new && it->second.blocked != d.rule.blocked))
            emit(out, std::string("link ") + (d.rule.blocked ? "block " : "unblock ") + src +
                          " " + dst);
    }
    rules_.clear();
    for (const auto& [key, d] : desired) rules_[key] = d.rule;
}

FaultEffect HostAgent::inject_kill(std::uint32_t node) {
    MachineRecord& rec = machine_mut(node);
    rec.state = transition(rec.state, LifecycleAction::Kill);
    FaultEffect effect{node, "kill", rec.state, rec.vcpu_allocation, {}};
    emit(effect.commands, "machine " + shaping_name(universe_, node) + " kill");
    for (auto& [key, rule] : rules_) {
        if (key.first != node && key.second != node) continue;
        if (rule.blocked) continue;
        rule.blocked = true;
        emit(effect.commands, "link block " + shaping_name(universe_, key.first) + " " +
                                  shaping_name(universe_, key.second));
    }
    return effect;
}

FaultEffect HostAgent::inject_reboot(std::uint32_t node) {
    MachineRecord& rec = machine_mut(node);
    rec.state = transition(rec.state, LifecycleAction::Reboot);
    FaultEffect effect{node, "reboot", rec.state, rec.vcpu_allocation, {}};
    emit(effect.commands, "machine " + shaping_name(universe_, node) + " boot");
    return effect;
}

FaultEffect HostAgent::inject_degrade(std::uint32_t node, double vcpu_fraction) {
    if (!(vcpu_fraction > 0.0 && vcpu_fraction <= 1.0))
        throw std::invalid_argument("vcpu fraction must be in (0, 1]");
    MachineRecord& rec = machine_mut(node);
    rec.vcpu_allocation = rec.resources.vcpus * vcpu_fraction;
    backend_->resource_change(current_epoch_s_, shaping_name(universe_, node),
                              rec.vcpu_allocation);
    return {node, "degrade", rec.state, rec.vcpu_allocation, {}};
}

}  // namespace leoemu
