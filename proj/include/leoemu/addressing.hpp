#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "leoemu/constellation.hpp"

namespace leoemu {

struct IPv4Address {
    std::uint32_t value = 0;

    std::string str() const;
    friend constexpr auto operator<=>(const IPv4Address&, const IPv4Address&) = default;
};

struct UnknownMachineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Every machine owns the /30 block at 10.0.0.0 + 4 * global_index: the
/// machine sits at base+2, its gateway at base+1. global_index is the node's
/// dense NodeId-order index. Throws std::out_of_range beyond 2^22 machines.
IPv4Address machine_address(std::uint32_t global_index);
IPv4Address gateway_address(std::uint32_t global_index);

/// Resolves "<id>.<shell>.celestial" / "<name>.gst.celestial" (or the
/// "gst.<name>.celestial" order) to the machine address. Throws
/// std::invalid_argument for malformed names, UnknownMachineError otherwise.
IPv4Address resolve(const Universe& universe, std::string_view name);

}  // namespace leoemu
