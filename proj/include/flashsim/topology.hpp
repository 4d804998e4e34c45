#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace flashsim {

using PageIndex = std::uint64_t;
using BlockIndex = std::uint64_t;

/// Dimensions of the channel > chip > die > plane > block > page hierarchy.
struct Geometry {
    std::uint32_t channels = 1;
    std::uint32_t chips_per_channel = 1;
    std::uint32_t dies_per_chip = 1;
    std::uint32_t planes_per_die = 1;
    std::uint32_t blocks_per_plane = 1;
    std::uint32_t pages_per_block = 1;
    std::uint32_t page_size = 4096;  ///< user data bytes per page
    std::uint32_t oob_size = 0;      ///< out-of-band bytes per page

    // Only meaningful after validate_geometry() succeeded.
    std::uint64_t total_pages() const noexcept;
    std::uint64_t total_blocks() const noexcept;
    std::uint64_t total_planes() const noexcept;
    std::uint64_t total_dies() const noexcept;

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Throws Error{ZeroDimension} or Error{Overflow}.
void validate_geometry(const Geometry& g);

struct FlashAddress {
    std::uint32_t channel = 0;
    std::uint32_t chip = 0;
    std::uint32_t die = 0;
    std::uint32_t plane = 0;
    std::uint32_t block = 0;
    std::uint32_t page = 0;

    friend auto operator<=>(const FlashAddress&, const FlashAddress&) = default;
};

std::string to_string(const FlashAddress& a);  // "ch.chip.die.plane.block.page"

bool in_range(const FlashAddress& a, const Geometry& g) noexcept;

// Mixed-radix linearization, channel most significant, page least.
PageIndex encode(const FlashAddress& a, const Geometry& g);
FlashAddress decode(PageIndex index, const Geometry& g);

/// Flat index of the block containing `a`, in the same digit order as encode().
BlockIndex block_index(const FlashAddress& a, const Geometry& g);

/// Same hierarchy prefix up to and including the plane.
bool same_plane(const FlashAddress& a, const FlashAddress& b) noexcept;
bool same_die(const FlashAddress& a, const FlashAddress& b) noexcept;
bool same_chip(const FlashAddress& a, const FlashAddress& b) noexcept;

enum class PageStatus : std::uint8_t { Erased, Written };

enum class StateWarning : std::uint8_t { EraseBeforeWrite, EnduranceExceeded };

struct StateChange {
    std::optional<StateWarning> warning;
    std::uint64_t erase_count = 0;  ///< block erase count after the change
};

/// Mutable per-page status and per-block wear. Blocks are materialized on
/// first touch so large geometries cost nothing until used.
class FlashState {
public:
    explicit FlashState(const Geometry& g,
                        std::optional<std::uint64_t> endurance_limit = std::nullopt,
                        PageStatus initial = PageStatus::Erased);

    const Geometry& geometry() const noexcept { return geometry_; }

    PageStatus page_status(const FlashAddress& a) const;
    std::uint64_t erase_count(const FlashAddress& a) const;

    StateChange write_page(const FlashAddress& a);
    StateChange erase_block(const FlashAddress& a);

private:
    struct Block {
        std::uint64_t erase_count = 0;
        std::vector<bool> written;
    };

    Block& touch(const FlashAddress& a);
    const Block* find(const FlashAddress& a) const;

    Geometry geometry_;
    std::optional<std::uint64_t> endurance_limit_;
    PageStatus initial_;
    std::unordered_map<BlockIndex, Block> blocks_;
};

}  // namespace flashsim
