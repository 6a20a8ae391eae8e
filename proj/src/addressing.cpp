#include "leoemu/addressing.hpp"

namespace leoemu {

std::string IPv4Address::str() const {
    return std::to_string((value >> 24) & 0xff) + "." + std::to_string((value >> 16) & 0xff) +
           "." + std::to_string((value >> 8) & 0xff) + "." + std::to_string(value & 0xff);
}

namespace {
constexpr std::uint32_t kBase = 0x0A000000;  // 10.0.0.0/8
constexpr std::uint32_t kMaxMachines = 1u << 22;
}  // namespace

IPv4Address machine_address(std::uint32_t global_index) {
    if (global_index >= kMaxMachines)
        throw std::out_of_range("address space exhausted: index " +
                                std::to_string(global_index));
    return {kBase + 4 * global_index + 2};
}

IPv4Address gateway_address(std::uint32_t global_index) {
    if (global_index >= kMaxMachines)
        throw std::out_of_range("address space exhausted: index " +
                                std::to_string(global_index));
    return {kBase + 4 * global_index + 1};
}

IPv4Address resolve(const Universe& universe, std::string_view name) {
    if (!name.ends_with(".celestial"))
        throw std::invalid_argument("name must end in .celestial: '" + std::string(name) +
                                    "'");
    const auto node = parse_node_ref(universe, name);
    if (!node) throw UnknownMachineError("no machine named '" + std::string(name) + "'");
    return machine_address(*node);
}

}  // namespace leoemu
