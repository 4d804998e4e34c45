#pragma once

#include "flashsim/commands.hpp"
#include "flashsim/expression.hpp"
#include "flashsim/resources.hpp"

#include <array>
#include <optional>
#include <string_view>
#include <variant>

namespace flashsim {

/// Inputs of one latency or power equation.
struct EventContext {
    EventKind kind = EventKind::CmdOverhead;
    std::uint64_t byte_count = 0;
    std::uint32_t page_size = 0;
    std::uint32_t oob_size = 0;
    FlashAddress address;
    std::optional<double> duration_us;  ///< set for power equations only

    VariableValues values() const;
};

/// Parameterized default equation:
///   latency: bus transfers  byte_count * value [us/B]; every other kind  value [us]
///   power:   energy [uJ] = value [mW] * duration [us] / 1000
///   idle:    value [mW]
struct BuiltIn {
    double value = 0.0;
    friend bool operator==(const BuiltIn&, const BuiltIn&) = default;
};

using Binding = std::variant<BuiltIn, Expression>;

/// Resource class an idle power binding applies to.
enum class IdleClass : std::uint8_t { Array, Bus };

/// Fixture defaults. Illustrative values, not vendor data.
namespace defaults {
inline constexpr double t_cmd_us = 0.0;
inline constexpr double t_sense_us = 25.0;
inline constexpr double t_prog_us = 200.0;
inline constexpr double t_erase_us = 1500.0;
inline constexpr double t_bus_us_per_byte = 0.025;
inline constexpr double t_buf_us = 0.0;
inline constexpr double p_sense_mw = 30.0;
inline constexpr double p_prog_mw = 40.0;
inline constexpr double p_erase_mw = 50.0;
inline constexpr double p_bus_mw = 20.0;
inline constexpr double p_buf_mw = 0.0;
inline constexpr double p_cmd_mw = 0.0;
}  // namespace defaults

/// Name of the built-in parameter for a kind, as spelled in the config: "t_sense", "p_bus", ...
std::string_view latency_parameter_name(EventKind kind);
std::string_view power_parameter_name(EventKind kind);

class ModelSet {
public:
    /// Nothing bound; every query throws UnboundEvent until set.
    ModelSet() = default;

    /// Every event kind bound to the fixture defaults, idle power 0.
    static ModelSet defaults();

    void set_latency(EventKind kind, Binding b) { latency_[index(kind)] = std::move(b); }
    void set_power(EventKind kind, Binding b) { power_[index(kind)] = std::move(b); }
    void set_idle(IdleClass cls, Binding b) { idle_[static_cast<std::size_t>(cls)] = std::move(b); }

    const std::optional<Binding>& latency_binding(EventKind kind) const { return latency_[index(kind)]; }
    const std::optional<Binding>& power_binding(EventKind kind) const { return power_[index(kind)]; }
    const std::optional<Binding>& idle_binding(IdleClass cls) const
    {
        return idle_[static_cast<std::size_t>(cls)];
    }

private:
    static std::size_t index(EventKind k) { return static_cast<std::size_t>(k); }

    std::array<std::optional<Binding>, kEventKindCount> latency_;
    std::array<std::optional<Binding>, kEventKindCount> power_;
    std::array<std::optional<Binding>, 2> idle_;
};

/// Event duration in microseconds. Throws UnboundEvent, NegativeResult,
/// NonFinite or DivisionByZero.
double latency(const EventContext& ctx, const ModelSet& set);

/// Event energy in microjoules; ctx.duration_us must be set.
double energy(const EventContext& ctx, const ModelSet& set);

/// Idle power in milliwatts of one resource. Unbound classes draw nothing.
double idle_power(const Resource& r, const Geometry& g, const ModelSet& set);

}  // namespace flashsim
