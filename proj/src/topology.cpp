#include "flashsim/topology.hpp"

#include "flashsim/error.hpp"

#include <array>

namespace flashsim {

namespace {

std::uint64_t checked_product(std::initializer_list<std::uint32_t> factors, bool& overflow)
{
    std::uint64_t acc = 1;
    for (auto f : factors) {
        if (__builtin_mul_overflow(acc, std::uint64_t{f}, &acc)) {
            overflow = true;
            return 0;
        }
    }
    return acc;
}

std::array<std::uint32_t, 6> radices(const Geometry& g)
{
    return {g.channels, g.chips_per_channel, g.dies_per_chip,
            g.planes_per_die, g.blocks_per_plane, g.pages_per_block};
}

std::array<std::uint32_t, 6> digits(const FlashAddress& a)
{
    return {a.channel, a.chip, a.die, a.plane, a.block, a.page};
}

std::string range_message(const FlashAddress& a, const Geometry& g)
{
    static constexpr std::array<const char*, 6> names = {
        "channel", "chip", "die", "plane", "block", "page"};
    const auto r = radices(g);
    const auto d = digits(a);
    for (std::size_t i = 0; i < 6; ++i) {
        if (d[i] >= r[i]) {
            return "address " + to_string(a) + ": " + names[i] + " index " +
                   std::to_string(d[i]) + " out of range [0, " + std::to_string(r[i]) + ")";
        }
    }
    return "address " + to_string(a) + " out of range";
}

}  // namespace

std::uint64_t Geometry::total_pages() const noexcept
{
    return total_blocks() * pages_per_block;
}

std::uint64_t Geometry::total_blocks() const noexcept
{
    return total_planes() * blocks_per_plane;
}

std::uint64_t Geometry::total_planes() const noexcept
{
    return total_dies() * planes_per_die;
}

std::uint64_t Geometry::total_dies() const noexcept
{
    return std::uint64_t{channels} * chips_per_channel * dies_per_chip;
}

void validate_geometry(const Geometry& g)
{
    for (auto r : radices(g)) {
        if (r == 0) {
            throw Error(ErrorCode::ZeroDimension, "geometry: every count must be at least 1");
        }
    }
    if (g.page_size == 0) {
        throw Error(ErrorCode::ZeroDimension, "geometry: page_size must be at least 1");
    }
    bool overflow = false;
    const auto r = radices(g);
    checked_product({r[0], r[1], r[2], r[3], r[4], r[5]}, overflow);
    if (overflow) {
        throw Error(ErrorCode::Overflow, "geometry: total page count overflows 64 bits");
    }
}

std::string to_string(const FlashAddress& a)
{
    return std::to_string(a.channel) + '.' + std::to_string(a.chip) + '.' +
           std::to_string(a.die) + '.' + std::to_string(a.plane) + '.' +
           std::to_string(a.block) + '.' + std::to_string(a.page);
}

bool in_range(const FlashAddress& a, const Geometry& g) noexcept
{
    const auto r = radices(g);
    const auto d = digits(a);
    for (std::size_t i = 0; i < 6; ++i) {
        if (d[i] >= r[i]) return false;
    }
    return true;
}

PageIndex encode(const FlashAddress& a, const Geometry& g)
{
    if (!in_range(a, g)) {
        throw Error(ErrorCode::AddressRange, range_message(a, g));
    }
    const auto r = radices(g);
    const auto d = digits(a);
    PageIndex index = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        index = index * r[i] + d[i];
    }
    return index;
}

FlashAddress decode(PageIndex index, const Geometry& g)
{
    if (index >= g.total_pages()) {
        throw Error(ErrorCode::AddressRange,
                    "flat index " + std::to_string(index) + " out of range [0, " +
                        std::to_string(g.total_pages()) + ")");
    }
    const auto r = radices(g);
    std::array<std::uint32_t, 6> d{};
    for (std::size_t i = 6; i-- > 0;) {
        d[i] = static_cast<std::uint32_t>(index % r[i]);
        index /= r[i];
    }
    return FlashAddress{d[0], d[1], d[2], d[3], d[4], d[5]};
}

BlockIndex block_index(const FlashAddress& a, const Geometry& g)
{
    return encode(a, g) / g.pages_per_block;
}

bool same_plane(const FlashAddress& a, const FlashAddress& b) noexcept
{
    return same_die(a, b) && a.plane == b.plane;
}

bool same_die(const FlashAddress& a, const FlashAddress& b) noexcept
{
    return same_chip(a, b) && a.die == b.die;
}

bool same_chip(const FlashAddress& a, const FlashAddress& b) noexcept
{
    return a.channel == b.channel && a.chip == b.chip;
}

FlashState::FlashState(const Geometry& g, std::optional<std::uint64_t> endurance_limit,
                       PageStatus initial)
    : geometry_(g), endurance_limit_(endurance_limit), initial_(initial)
{
    validate_geometry(g);
}

const FlashState::Block* FlashState::find(const FlashAddress& a) const
{
    auto it = blocks_.find(block_index(a, geometry_));
    return it == blocks_.end() ? nullptr : &it->second;
}

FlashState::Block& FlashState::touch(const FlashAddress& a)
{
    auto [it, inserted] = blocks_.try_emplace(block_index(a, geometry_));
    if (inserted) {
        it->second.written.assign(geometry_.pages_per_block, initial_ == PageStatus::Written);
    }
    return it->second;
}

PageStatus FlashState::page_status(const FlashAddress& a) const
{
    const Block* b = find(a);
    if (b == nullptr) return initial_;
    return b->written[a.page] ? PageStatus::Written : PageStatus::Erased;
}

std::uint64_t FlashState::erase_count(const FlashAddress& a) const
{
    const Block* b = find(a);
    return b == nullptr ? 0 : b->erase_count;
}

StateChange FlashState::write_page(const FlashAddress& a)
{
    Block& b = touch(a);
    StateChange change;
    if (b.written[a.page]) {
        change.warning = StateWarning::EraseBeforeWrite;
    }
    b.written[a.page] = true;
    change.erase_count = b.erase_count;
    return change;
}

StateChange FlashState::erase_block(const FlashAddress& a)
{
    Block& b = touch(a);
    b.written.assign(b.written.size(), false);
    ++b.erase_count;
    StateChange change;
    change.erase_count = b.erase_count;
    if (endurance_limit_ && b.erase_count > *endurance_limit_) {
        change.warning = StateWarning::EnduranceExceeded;
    }
    return change;
}

}  // namespace flashsim
