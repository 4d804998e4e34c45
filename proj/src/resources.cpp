#include "flashsim/resources.hpp"

#include "flashsim/error.hpp"

namespace flashsim {

ResourceMap::ResourceMap(const Geometry& g, bool die_serialization)
    : geometry_(g), die_serialization_(die_serialization)
{
    validate_geometry(g);
    const std::uint64_t units = die_serialization ? g.total_dies() : g.total_planes();
    if (units + g.channels > 0xffffffffULL) {
        throw Error(ErrorCode::Overflow, "geometry: too many resources");
    }
    size_ = static_cast<std::size_t>(units + g.channels);
}

ResourceId ResourceMap::array_unit(const FlashAddress& a) const noexcept
{
    std::uint64_t die = (std::uint64_t{a.channel} * geometry_.chips_per_channel + a.chip) *
                            geometry_.dies_per_chip + a.die;
    std::uint64_t unit = die_serialization_ ? die : die * geometry_.planes_per_die + a.plane;
    return static_cast<ResourceId>(geometry_.channels + unit);
}

Resource ResourceMap::describe(ResourceId id) const
{
    if (id >= size_) {
        throw Error(ErrorCode::AddressRange, "resource id " + std::to_string(id) + " out of range");
    }
    Resource r;
    if (id < geometry_.channels) {
        r.kind = ResourceKind::ChannelBus;
        r.channel = id;
        return r;
    }
    std::uint64_t unit = id - geometry_.channels;
    if (die_serialization_) {
        r.kind = ResourceKind::Die;
    } else {
        r.kind = ResourceKind::Plane;
        r.plane = static_cast<std::uint32_t>(unit % geometry_.planes_per_die);
        unit /= geometry_.planes_per_die;
    }
    r.die = static_cast<std::uint32_t>(unit % geometry_.dies_per_chip);
    unit /= geometry_.dies_per_chip;
    r.chip = static_cast<std::uint32_t>(unit % geometry_.chips_per_channel);
    r.channel = static_cast<std::uint32_t>(unit / geometry_.chips_per_channel);
    return r;
}

std::string ResourceMap::name(ResourceId id) const
{
    const Resource r = describe(id);
    const auto s = [](std::uint32_t v) { return std::to_string(v); };
    switch (r.kind) {
        case ResourceKind::ChannelBus:
            return "bus[" + s(r.channel) + "]";
        case ResourceKind::Die:
            return "die[" + s(r.channel) + "." + s(r.chip) + "." + s(r.die) + "]";
        case ResourceKind::Plane:
            return "plane[" + s(r.channel) + "." + s(r.chip) + "." + s(r.die) + "." + s(r.plane) + "]";
    }
    return {};
}

}  // namespace flashsim
