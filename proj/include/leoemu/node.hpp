#pragma once

#include <compare>
#include <cstdint>

namespace leoemu {

enum class NodeKind : std::uint8_t { Satellite = 0, GroundStation = 1 };

/// Identity of an emulated machine. The ordering (satellites first, then by
/// shell, then id; ground stations after, by id) is the tie-breaking order
/// used throughout: link endpoints, host assignment, path selection.
struct NodeId {
    NodeKind kind = NodeKind::Satellite;
    int shell = 0;  // satellites only; 0 for ground stations
    int id = 0;     // unique within kind+shell

    friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

}  // namespace leoemu
