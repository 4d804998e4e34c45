#pragma once

#include "flashsim/topology.hpp"

#include <cstdint>
#include <string>

namespace flashsim {

using ResourceId = std::uint32_t;

enum class ResourceKind : std::uint8_t { ChannelBus, Plane, Die };

struct Resource {
    ResourceKind kind = ResourceKind::ChannelBus;
    std::uint32_t channel = 0;
    std::uint32_t chip = 0;  // unused for ChannelBus
    std::uint32_t die = 0;   // unused for ChannelBus
    std::uint32_t plane = 0; // Plane only
};

/// Dense numbering of the exclusive resources of a geometry.
///
/// Ids [0, channels) are the channel buses. The array units follow in
/// mixed-radix order: one per plane, or one per die when die serialization
/// is enabled.
class ResourceMap {
public:
    ResourceMap(const Geometry& g, bool die_serialization);

    ResourceId bus(std::uint32_t channel) const noexcept { return channel; }
    ResourceId array_unit(const FlashAddress& a) const noexcept;

    std::size_t size() const noexcept { return size_; }
    Resource describe(ResourceId id) const;
    std::string name(ResourceId id) const;  // "bus[0]", "plane[0.0.1.0]", "die[0.0.1]"

    bool die_serialization() const noexcept { return die_serialization_; }

private:
    Geometry geometry_;
    bool die_serialization_;
    std::size_t size_;
};

}  // namespace flashsim
