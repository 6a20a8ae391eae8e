#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "leoemu/agent.hpp"
#include "support.hpp"

using namespace leoemu;
using testsupport::RecordingBackend;

namespace {

struct Rig {
    EmulationConfig cfg = testsupport::mini_config();
    Engine engine{cfg};
    HostAssignment assignment = assign_machines(cfg, engine.universe(), true);
    RecordingBackend backend0, backend1;
    HostAgent agent0{0, engine.universe(), assignment, cfg.hosts, cfg.update_interval_s,
                     backend0};
    HostAgent agent1{1, engine.universe(), assignment, cfg.hosts, cfg.update_interval_s,
                     backend1};

    // mini_config: satellites 0..11 ("0.0".."11.0") and node 12 ("gst.base");
    // round robin puts the even satellites and the station on host 0.
};

bool sorted_machine_then_link(const std::vector<ShapingCommand>& cmds) {
    const auto first_link = std::find_if(cmds.begin(), cmds.end(), [](const auto& c) {
        return c.starts_with("link ");
    });
    return std::all_of(first_link, cmds.end(),
                       [](const auto& c) { return c.starts_with("link "); });
}

}  // namespace

TEST_CASE("the lifecycle table is exactly the specified one") {
    using S = MachineState;
    using A = LifecycleAction;
    const std::vector<std::tuple<S, A, S>> legal{
        {S::Created, A::Boot, S::Active},      {S::Active, A::Suspend, S::Suspended},
        {S::Suspended, A::Resume, S::Active},  {S::Active, A::Kill, S::Killed},
        {S::Suspended, A::Kill, S::Killed},    {S::Killed, A::Reboot, S::Active},
    };
    for (S state : {S::Created, S::Active, S::Suspended, S::Killed}) {
        for (A action : {A::Boot, A::Suspend, A::Resume, A::Kill, A::Reboot}) {
            const auto it = std::find_if(legal.begin(), legal.end(), [&](const auto& row) {
                return std::get<0>(row) == state && std::get<1>(row) == action;
            });
            if (it != legal.end()) {
                CHECK(transition(state, action) == std::get<2>(*it));
            } else {
                CHECK_THROWS_AS(transition(state, action), LifecycleError);
            }
        }
    }
    // Errors name the state and the action.
    try {
        transition(S::Suspended, A::Boot);
        FAIL("expected LifecycleError");
    } catch (const LifecycleError& e) {
        const std::string what = e.what();
        CHECK(what.find("suspended") != std::string::npos);
        CHECK(what.find("boot") != std::string::npos);
    }
}

TEST_CASE("latency compensation clamps at zero") {
    CHECK(compensate_host_latency(5000, 200) == 4800);
    CHECK(compensate_host_latency(5000, 0) == 5000);
    CHECK(compensate_host_latency(100, 200) == 0);
}

TEST_CASE("delay quantization rounds half-up to 0.1 ms") {
    CHECK(quantize_delay_tenths_ms(13'350) == 134);
    CHECK(quantize_delay_tenths_ms(13'349) == 133);
    CHECK(quantize_delay_tenths_ms(150) == 2);
    CHECK(quantize_delay_tenths_ms(149) == 1);
    CHECK(quantize_delay_tenths_ms(0) == 0);
    CHECK(format_delay_ms(134) == "13.4");
    CHECK(format_delay_ms(0) == "0.0");
    CHECK(format_delay_ms(20) == "2.0");
}

TEST_CASE("epoch zero boots machines and shapes every local direction") {
    Rig rig;
    const EpochUpdate u0 = rig.engine.step();
    const auto cmds = rig.agent0.apply_update(u0);

    // Host 0 owns satellites 0,2,4,6,8,10 and the station.
    CHECK(std::count_if(cmds.begin(), cmds.end(), [](const auto& c) {
              return c.starts_with("machine ");
          }) == 7);
    CHECK(std::find(cmds.begin(), cmds.end(), "machine 0.0 boot") != cmds.end());
    CHECK(std::find(cmds.begin(), cmds.end(), "machine gst.base boot") != cmds.end());
    CHECK(sorted_machine_then_link(cmds));

    for (const auto& c : cmds)
        if (c.starts_with("link set")) CHECK(c.find(" delay ") != std::string::npos);

    CHECK(rig.agent0.machine(0).state == MachineState::Active);
    CHECK(rig.agent0.machine(12).state == MachineState::Active);
    CHECK_THROWS_AS(rig.agent0.machine(1), UnknownMachineError);

    // Applying the same update again changes nothing.
    CHECK(rig.agent0.apply_update(u0).empty());
}

TEST_CASE("cross-host rules compensate the host base latency") {
    Rig rig;
    const EpochUpdate u0 = rig.engine.step();
    rig.agent0.apply_update(u0);
    rig.agent1.apply_update(u0);

    // ISL (0,1) spans hosts; ground link (0,12) stays on host 0.
    bool saw_cross = false, saw_same = false;
    const auto& snap = rig.engine.current().snapshot;
    for (const LinkState& l : snap.links) {
        const std::int64_t cross = quantize_delay_tenths_ms(
            compensate_host_latency(l.latency_us, 200));
        const std::int64_t same = quantize_delay_tenths_ms(l.latency_us);
        const auto& rules0 = rig.agent0.rules();
        if (l.a == 0 && l.b == 1) {
            CHECK(rules0.at({0, 1}).delay_tenths_ms == cross);
            CHECK(rig.agent1.rules().at({1, 0}).delay_tenths_ms == cross);
            saw_cross = true;
        }
        if (l.a == 0 && l.b == 12) {
            CHECK(rules0.at({0, 12}).delay_tenths_ms == same);
            CHECK(rules0.at({12, 0}).delay_tenths_ms == same);
            saw_same = true;
        }
    }
    CHECK(saw_cross);
    CHECK(saw_same);
}

TEST_CASE("incremental updates emit only the delta; removal blocks; re-add unblocks") {
    Rig rig;
    EpochUpdate u0 = rig.engine.step();
    rig.agent0.apply_update(u0);
    REQUIRE(rig.agent0.rules().contains({0, 1}));
    const ShapingRule before = rig.agent0.rules().at({0, 1});

    // Hand-crafted epoch 1: latency change on (0,1).
    EpochUpdate u1;
    u1.epoch_s = rig.cfg.update_interval_s;
    u1.full = false;
    LinkDiff lat;
    lat.a = 0;
    lat.b = 1;
    lat.change = LinkChange::LatencyChanged;
    lat.state = {0, 1, before.delay_tenths_ms * 100 + 13'350, 0, false};
    u1.diffs.push_back(lat);
    const auto cmds1 = rig.agent0.apply_update(u1);
    REQUIRE(cmds1.size() == 1);
    CHECK(cmds1[0].starts_with("link set 0.0 1.0 delay "));
    CHECK(cmds1[0].find("ms rate ") != std::string::npos);

    // Epoch 2: the link disappears -> block, rule retained.
    EpochUpdate u2;
    u2.epoch_s = 2 * rig.cfg.update_interval_s;
    u2.full = false;
    u2.diffs.push_back({0, 1, LinkChange::Removed, {}});
    const auto cmds2 = rig.agent0.apply_update(u2);
    REQUIRE(cmds2.size() == 1);
    CHECK(cmds2[0] == "link block 0.0 1.0");
    CHECK(rig.agent0.rules().at({0, 1}).blocked);

    // Epoch 3: it comes back -> set + unblock.
    EpochUpdate u3;
    u3.epoch_s = 3 * rig.cfg.update_interval_s;
    u3.full = false;
    LinkDiff add;
    add.a = 0;
    add.b = 1;
    add.change = LinkChange::Added;
    add.state = {0, 1, 9'000, 10'000'000, false};
    u3.diffs.push_back(add);
    const auto cmds3 = rig.agent0.apply_update(u3);
    REQUIRE(cmds3.size() == 2);
    CHECK(cmds3[0].starts_with("link set 0.0 1.0 "));
    CHECK(cmds3[1] == "link unblock 0.0 1.0");
    CHECK_FALSE(rig.agent0.rules().at({0, 1}).blocked);
}

TEST_CASE("out-of-order updates are protocol errors recovered by a full snapshot") {
    Rig rig;
    const EpochUpdate u0 = rig.engine.step();
    rig.agent0.apply_update(u0);
    rig.engine.step();
    const EpochUpdate u2 = rig.engine.step();  // skips epoch 1 from the agent's view

    CHECK_FALSE(rig.agent0.needs_full());
    CHECK_THROWS_AS(rig.agent0.apply_update(u2), ProtocolError);
    CHECK(rig.agent0.needs_full());

    // Even the next in-order incremental is refused until a full arrives.
    CHECK_THROWS_AS(rig.agent0.apply_update(u2), ProtocolError);
    const EpochUpdate recovery = rig.engine.full_update();
    CHECK_NOTHROW(rig.agent0.apply_update(recovery));
    CHECK_FALSE(rig.agent0.needs_full());
}

TEST_CASE("an agent that never saw a full update refuses incremental ones") {
    Rig rig;
    rig.engine.step();
    const EpochUpdate u1 = rig.engine.step();
    CHECK_THROWS_AS(rig.agent0.apply_update(u1), ProtocolError);
    CHECK(rig.agent0.needs_full());
}

TEST_CASE("base latency above target clamps to zero and records a warning") {
    EmulationConfig cfg = testsupport::mini_config();
    cfg.hosts[0].base_latency_us = 50'000;  // larger than any link latency here
    cfg.hosts[1].base_latency_us = 50'000;
    Engine engine(cfg);
    const HostAssignment assignment = assign_machines(cfg, engine.universe(), true);
    RecordingBackend backend;
    HostAgent agent(0, engine.universe(), assignment, cfg.hosts, cfg.update_interval_s,
                    backend);
    const auto cmds = agent.apply_update(engine.step());
    bool saw_zero = false;
    for (const auto& c : cmds)
        if (c.find("link set 0.0 1.0 delay 0.0ms") != std::string::npos) saw_zero = true;
    CHECK(saw_zero);
    CHECK(!agent.warnings().empty());
}

TEST_CASE("kill blocks local rules immediately; reboot boots the machine") {
    Rig rig;
    rig.agent0.apply_update(rig.engine.step());

    const FaultEffect killed = rig.agent0.inject_kill(0);
    CHECK(killed.new_state == MachineState::Killed);
    REQUIRE(!killed.commands.empty());
    CHECK(killed.commands[0] == "machine 0.0 kill");
    for (const auto& [key, rule] : rig.agent0.rules())
        if (key.first == 0 || key.second == 0) CHECK(rule.blocked);

    const FaultEffect rebooted = rig.agent0.inject_reboot(0);
    CHECK(rebooted.new_state == MachineState::Active);
    REQUIRE(rebooted.commands.size() == 1);
    CHECK(rebooted.commands[0] == "machine 0.0 boot");

    CHECK_THROWS_AS(rig.agent0.inject_reboot(0), LifecycleError);  // already active
    CHECK_THROWS_AS(rig.agent0.inject_kill(99), UnknownMachineError);
}

TEST_CASE("degrade records the scaled vcpu allocation and emits an event") {
    Rig rig;
    rig.agent0.apply_update(rig.engine.step());
    const FaultEffect effect = rig.agent0.inject_degrade(0, 0.5);
    CHECK(effect.vcpu_allocation == 1.0);  // 2 vcpus * 0.5
    CHECK(rig.agent0.machine(0).vcpu_allocation == 1.0);
    REQUIRE(rig.backend0.events.size() == 1);
    CHECK(rig.backend0.events[0].machine == "0.0");
    CHECK(rig.backend0.events[0].vcpus == 1.0);
    CHECK_THROWS_AS(rig.agent0.inject_degrade(0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(rig.agent0.inject_degrade(0, 1.5), std::invalid_argument);
}

TEST_CASE("replaying the incremental stream matches state built from the last snapshot") {
    EmulationConfig cfg;
    {
        auto parsed = load_config(testsupport::config_path("iridium.toml"));
        REQUIRE(parsed.ok());
        cfg = *parsed.config;
        cfg.duration_s = 300.0;  // 60 epochs
    }
    Engine engine(cfg);
    const HostAssignment assignment = assign_machines(cfg, engine.universe(), true);
    RecordingBackend incremental_backend, fresh_backend;
    HostAgent incremental(0, engine.universe(), assignment, cfg.hosts, cfg.update_interval_s,
                          incremental_backend);
    for (std::int64_t k = 0; k < engine.total_epochs(); ++k)
        incremental.apply_update(engine.step());

    // Oracle: a fresh agent fed only the final full snapshot.
    HostAgent fresh(0, engine.universe(), assignment, cfg.hosts, cfg.update_interval_s,
                    fresh_backend);
    fresh.apply_update(engine.full_update());

    // Every rule the fresh agent has must match; extra rules in the replayed
    // agent must be blocked leftovers of removed links.
    for (const auto& [key, rule] : fresh.rules()) {
        REQUIRE(incremental.rules().contains(key));
        CHECK(incremental.rules().at(key) == rule);
    }
    for (const auto& [key, rule] : incremental.rules())
        if (!fresh.rules().contains(key)) CHECK(rule.blocked);

    // Machine states agree as well.
    for (std::uint32_t i = 0; i < engine.universe().size(); ++i) {
        if (!incremental.manages(i)) continue;
        CHECK(incremental.machine(i).state == fresh.machine(i).state);
    }
}

TEST_CASE("every emitted delay is on the 0.1 ms grid and within 50 us of target") {
    EmulationConfig cfg;
    {
        auto parsed = load_config(testsupport::config_path("iridium.toml"));
        REQUIRE(parsed.ok());
        cfg = *parsed.config;
        cfg.duration_s = 100.0;  // 20 epochs
    }
    Engine engine(cfg);
    const HostAssignment assignment = assign_machines(cfg, engine.universe(), true);
    RecordingBackend backend;
    HostAgent agent(0, engine.universe(), assignment, cfg.hosts, cfg.update_interval_s,
                    backend);
    for (std::int64_t k = 0; k < engine.total_epochs(); ++k) agent.apply_update(engine.step());

    int checked = 0;
    for (const auto& [epoch, cmd] : backend.commands) {
        const auto pos = cmd.find(" delay ");
        if (pos == std::string::npos) continue;
        const auto ms_pos = cmd.find("ms", pos + 7);
        const double ms = std::stod(cmd.substr(pos + 7, ms_pos - pos - 7));
        const auto tenths = static_cast<std::int64_t>(std::llround(ms * 10.0));
        CHECK(std::abs(ms * 10.0 - static_cast<double>(tenths)) < 1e-9);  // one decimal digit
        ++checked;
    }
    CHECK(checked > 100);
}
