#include "flashsim/models.hpp"

#include "flashsim/error.hpp"

#include <cmath>

namespace flashsim {

namespace {

void set_var(VariableValues& v, Variable var, double value)
{
    v[static_cast<std::size_t>(var)] = value;
}

double checked(double value, EventKind kind, std::string_view what)
{
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::NonFinite, std::string(what) + " of " + std::string(to_string(kind)) +
                                              " is not a finite number");
    }
    if (value < 0.0) {
        throw Error(ErrorCode::NegativeResult, std::string(what) + " of " +
                                                   std::string(to_string(kind)) + " is negative (" +
                                                   std::to_string(value) + ")");
    }
    return value;
}

bool is_transfer(EventKind k)
{
    return k == EventKind::BusTransferIn || k == EventKind::BusTransferOut;
}

}  // namespace

VariableValues EventContext::values() const
{
    VariableValues v{};
    set_var(v, Variable::ByteCount, static_cast<double>(byte_count));
    set_var(v, Variable::PageSize, page_size);
    set_var(v, Variable::OobSize, oob_size);
    set_var(v, Variable::Channel, address.channel);
    set_var(v, Variable::Chip, address.chip);
    set_var(v, Variable::Die, address.die);
    set_var(v, Variable::Plane, address.plane);
    set_var(v, Variable::Block, address.block);
    set_var(v, Variable::Page, address.page);
    set_var(v, Variable::Duration, duration_us.value_or(0.0));
    return v;
}

std::string_view latency_parameter_name(EventKind kind)
{
    switch (kind) {
        case EventKind::CmdOverhead: return "t_cmd";
        case EventKind::ArraySense: return "t_sense";
        case EventKind::ArrayProgram: return "t_prog";
        case EventKind::BlockErase: return "t_erase";
        case EventKind::BusTransferIn:
        case EventKind::BusTransferOut: return "t_bus_per_byte";
        case EventKind::BufferCopy: return "t_buf";
    }
    return {};
}

std::string_view power_parameter_name(EventKind kind)
{
    switch (kind) {
        case EventKind::CmdOverhead: return "p_cmd";
        case EventKind::ArraySense: return "p_sense";
        case EventKind::ArrayProgram: return "p_prog";
        case EventKind::BlockErase: return "p_erase";
        case EventKind::BusTransferIn:
        case EventKind::BusTransferOut: return "p_bus";
        case EventKind::BufferCopy: return "p_buf";
    }
    return {};
}

ModelSet ModelSet::defaults()
{
    using namespace flashsim::defaults;
    ModelSet m;
    m.set_latency(EventKind::CmdOverhead, BuiltIn{t_cmd_us});
    m.set_latency(EventKind::ArraySense, BuiltIn{t_sense_us});
    m.set_latency(EventKind::ArrayProgram, BuiltIn{t_prog_us});
    m.set_latency(EventKind::BlockErase, BuiltIn{t_erase_us});
    m.set_latency(EventKind::BusTransferIn, BuiltIn{t_bus_us_per_byte});
    m.set_latency(EventKind::BusTransferOut, BuiltIn{t_bus_us_per_byte});
    m.set_latency(EventKind::BufferCopy, BuiltIn{t_buf_us});
    m.set_power(EventKind::CmdOverhead, BuiltIn{p_cmd_mw});
    m.set_power(EventKind::ArraySense, BuiltIn{p_sense_mw});
    m.set_power(EventKind::ArrayProgram, BuiltIn{p_prog_mw});
    m.set_power(EventKind::BlockErase, BuiltIn{p_erase_mw});
    m.set_power(EventKind::BusTransferIn, BuiltIn{p_bus_mw});
    m.set_power(EventKind::BusTransferOut, BuiltIn{p_bus_mw});
    m.set_power(EventKind::BufferCopy, BuiltIn{p_buf_mw});
    m.set_idle(IdleClass::Array, BuiltIn{0.0});
    m.set_idle(IdleClass::Bus, BuiltIn{0.0});
    return m;
}

double latency(const EventContext& ctx, const ModelSet& set)
{
    const auto& binding = set.latency_binding(ctx.kind);
    if (!binding) {
        throw Error(ErrorCode::UnboundEvent,
                    "no performance model bound for " + std::string(to_string(ctx.kind)));
    }
    double value = 0.0;
    if (const auto* b = std::get_if<BuiltIn>(&*binding)) {
        value = is_transfer(ctx.kind) ? static_cast<double>(ctx.byte_count) * b->value : b->value;
    } else {
        value = std::get<Expression>(*binding).evaluate(ctx.values());
    }
    return checked(value, ctx.kind, "latency");
}

double energy(const EventContext& ctx, const ModelSet& set)
{
    if (!ctx.duration_us) {
        throw Error(ErrorCode::BadValue, "energy of " + std::string(to_string(ctx.kind)) +
                                             " requested without a duration");
    }
    const auto& binding = set.power_binding(ctx.kind);
    if (!binding) {
        throw Error(ErrorCode::UnboundEvent,
                    "no power model bound for " + std::string(to_string(ctx.kind)));
    }
    double value = 0.0;
    if (const auto* b = std::get_if<BuiltIn>(&*binding)) {
        value = b->value * *ctx.duration_us / 1000.0;
    } else {
        value = std::get<Expression>(*binding).evaluate(ctx.values());
    }
    return checked(value, ctx.kind, "energy");
}

double idle_power(const Resource& r, const Geometry& g, const ModelSet& set)
{
    const IdleClass cls = r.kind == ResourceKind::ChannelBus ? IdleClass::Bus : IdleClass::Array;
    const auto& binding = set.idle_binding(cls);
    if (!binding) return 0.0;
    double value = 0.0;
    if (const auto* b = std::get_if<BuiltIn>(&*binding)) {
        value = b->value;
    } else {
        EventContext ctx;
        ctx.page_size = g.page_size;
        ctx.oob_size = g.oob_size;
        ctx.address = FlashAddress{r.channel, r.chip, r.die, r.plane, 0, 0};
        value = std::get<Expression>(*binding).evaluate(ctx.values());
    }
    if (!std::isfinite(value) || value < 0.0) {
        throw Error(value < 0.0 ? ErrorCode::NegativeResult : ErrorCode::NonFinite,
                    "idle power must be a non-negative finite number");
    }
    return value;
}

}  // namespace flashsim
