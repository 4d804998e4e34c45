#include "flashsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <tuple>

namespace flashsim {

namespace {

std::string summarize(const std::vector<Finding>& findings)
{
    std::size_t errors = 0;
    for (const auto& f : findings) {
        if (f.severity == Severity::Error) ++errors;
    }
    return "validation failed with " + std::to_string(errors) + " error(s)";
}

EventContext context_for(const FlashEvent& e, const Geometry& g)
{
    EventContext ctx;
    ctx.kind = e.kind;
    ctx.byte_count = e.byte_count;
    ctx.page_size = g.page_size;
    ctx.oob_size = g.oob_size;
    ctx.address = e.target;
    return ctx;
}

TimeNs to_ns(double us)
{
    const double ns = std::round(us * 1000.0);
    if (ns > 9.0e18) {
        throw Error(ErrorCode::Overflow, "event duration exceeds the simulated time range");
    }
    return static_cast<TimeNs>(ns);
}

struct PendingEvent {
    FlashEvent event;
    TimeNs duration = 0;
    double energy_uj = 0.0;
    std::size_t open_deps = 0;
    TimeNs ready_at = 0;  // max(arrival, dependency ends) once open_deps == 0
    bool ready = false;
    bool started = false;
    TimeNs start = 0;
    std::vector<EventId> dependents;
};

struct PendingCommand {
    std::vector<PendingEvent> events;
};

// Heap entry; completions sort before arrivals at the same instant.
struct Happening {
    TimeNs time;
    int type;  // 0 completion, 1 arrival
    std::size_t command;
    EventId event;

    auto key() const { return std::tie(time, type, command, event); }
    bool operator>(const Happening& o) const { return key() > o.key(); }
};

class Scheduler {
public:
    Scheduler(std::vector<PendingCommand>& cmds, std::span<const Command> trace,
              std::size_t resource_count)
        : cmds_(cmds), trace_(trace), queues_(resource_count), busy_(resource_count, false)
    {
    }

    void run()
    {
        for (std::size_t c = 0; c < trace_.size(); ++c) {
            heap_.push({trace_[c].arrival, 1, c, 0});
        }
        while (!heap_.empty()) {
            const Happening h = heap_.top();
            heap_.pop();
            now_ = h.time;
            if (h.type == 1) {
                arrive(h.command);
            } else {
                complete(h.command, h.event);
            }
        }
    }

private:
    void arrive(std::size_t c)
    {
        auto& events = cmds_[c].events;
        for (EventId id = 0; id < events.size(); ++id) {
            if (events[id].event.resource) {
                queues_[*events[id].event.resource].push_back({c, id});
            }
        }
        for (EventId id = 0; id < events.size(); ++id) {
            if (events[id].open_deps == 0) {
                events[id].ready = true;
                events[id].ready_at = now_;
                try_start(c, id);
            }
        }
    }

    void complete(std::size_t c, EventId id)
    {
        auto& ev = cmds_[c].events[id];
        if (ev.event.resource) {
            const ResourceId r = *ev.event.resource;
            busy_[r] = false;
            queues_[r].pop_front();
            if (!queues_[r].empty()) {
                const auto [nc, nid] = queues_[r].front();
                try_start(nc, nid);
            }
        }
        for (EventId d : ev.dependents) {
            auto& dep = cmds_[c].events[d];
            dep.ready_at = std::max(dep.ready_at, now_);
            if (--dep.open_deps == 0) {
                dep.ready = true;
                try_start(c, d);
            }
        }
    }

    void try_start(std::size_t c, EventId id)
    {
        auto& ev = cmds_[c].events[id];
        if (ev.started || !ev.ready) return;
        if (ev.event.resource) {
            const ResourceId r = *ev.event.resource;
            if (busy_[r]) return;
            const auto& head = queues_[r].front();
            if (head.first != c || head.second != id) return;
            busy_[r] = true;
        }
        ev.started = true;
        ev.start = now_;
        heap_.push({now_ + ev.duration, 0, c, id});
    }

    std::vector<PendingCommand>& cmds_;
    std::span<const Command> trace_;
    std::vector<std::deque<std::pair<std::size_t, EventId>>> queues_;
    std::vector<bool> busy_;
    std::priority_queue<Happening, std::vector<Happening>, std::greater<>> heap_;
    TimeNs now_ = 0;
};

}  // namespace

RunError::RunError(std::vector<Finding> findings)
    : Error(ErrorCode::ValidationFailed, summarize(findings)), findings_(std::move(findings))
{
}

Engine::Engine(const Geometry& g, const CommandSet& supported, const ModelSet& models,
               const Policy& policy)
    : geometry_(g), supported_(supported), models_(models), policy_(policy),
      resources_(g, policy.die_serialization)
{
}

TimeNs event_duration(const FlashEvent& e, const Geometry& g, const ModelSet& models)
{
    return to_ns(latency(context_for(e, g), models));
}

RunResult Engine::run(std::span<const Command> trace) const
{
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const auto& a = trace[i - 1];
        const auto& b = trace[i];
        if (std::tie(b.arrival, b.sequence_id) < std::tie(a.arrival, a.sequence_id)) {
            throw Error(ErrorCode::TraceError,
                        "trace is not ordered by (arrival, sequence) at entry " + std::to_string(i));
        }
    }
    for (const auto& c : trace) {
        if (c.arrival < 0) {
            throw Error(ErrorCode::TraceError, "negative arrival time in entry " +
                                                   std::to_string(c.sequence_id));
        }
    }

    auto findings = check_commands(trace, geometry_, supported_, policy_);
    if (std::any_of(findings.begin(), findings.end(),
                    [](const Finding& f) { return f.severity == Severity::Error; })) {
        throw RunError(std::move(findings));
    }

    std::vector<PendingCommand> pending(trace.size());
    for (std::size_t c = 0; c < trace.size(); ++c) {
        auto events = decompose(trace[c], geometry_, resources_, policy_.cmd_overhead_on_bus);
        auto& pc = pending[c];
        pc.events.resize(events.size());
        for (EventId id = 0; id < events.size(); ++id) {
            auto& pe = pc.events[id];
            pe.event = std::move(events[id]);
            pe.duration = event_duration(pe.event, geometry_, models_);
            auto ctx = context_for(pe.event, geometry_);
            ctx.duration_us = static_cast<double>(pe.duration) / 1000.0;
            pe.energy_uj = energy(ctx, models_);
            pe.open_deps = pe.event.depends_on.size();
            pe.ready_at = trace[c].arrival;
            for (EventId d : pe.event.depends_on) pc.events[d].dependents.push_back(id);
        }
    }

    Scheduler(pending, trace, resources_.size()).run();

    RunResult result{resources_, {}, {}, {}, {}, {}, 0, 0};
    result.busy_ns.assign(resources_.size(), 0);
    result.warnings = findings;
    result.commands.reserve(trace.size());

    std::size_t next_finding = 0;
    for (std::size_t c = 0; c < trace.size(); ++c) {
        const Command& cmd = trace[c];
        CommandResult cr;
        cr.sequence_id = cmd.sequence_id;
        cr.kind = cmd.kind;
        cr.line = cmd.line;
        cr.arrival = cmd.arrival;
        cr.completion = cmd.arrival;
        EventId id = 0;
        for (auto& pe : pending[c].events) {
            ScheduledEvent se;
            se.sequence_id = cmd.sequence_id;
            se.event_id = id++;
            se.start = pe.start;
            se.duration = pe.duration;
            se.energy_uj = pe.energy_uj;
            se.event = std::move(pe.event);
            cr.completion = std::max(cr.completion, se.end());
            cr.energy_uj += se.energy_uj;
            if (se.event.resource) result.busy_ns[*se.event.resource] += se.duration;
            result.events.push_back(std::move(se));
        }
        cr.latency = cr.completion - cr.arrival;
        // findings are emitted in trace order
        while (next_finding < findings.size() && findings[next_finding].sequence_id == cmd.sequence_id) {
            cr.warnings.push_back(findings[next_finding++]);
        }
        result.last_completion = std::max(result.last_completion, cr.completion);
        result.commands.push_back(std::move(cr));
    }
    if (!trace.empty()) {
        result.first_arrival = trace.front().arrival;
    }
    std::sort(result.events.begin(), result.events.end(),
              [](const ScheduledEvent& a, const ScheduledEvent& b) {
                  return std::tie(a.start, a.sequence_id, a.event_id) <
                         std::tie(b.start, b.sequence_id, b.event_id);
              });
    result.idle_energy_uj =
        idle_accounting(result.busy_ns, result.makespan(), resources_, geometry_, models_);
    return result;
}

std::vector<double> idle_accounting(const std::vector<TimeNs>& busy_ns, TimeNs makespan,
                                    const ResourceMap& resources, const Geometry& g,
                                    const ModelSet& models)
{
    std::vector<double> idle(resources.size(), 0.0);
    for (ResourceId r = 0; r < resources.size(); ++r) {
        const TimeNs idle_ns = std::max<TimeNs>(0, makespan - busy_ns[r]);
        const double mw = idle_power(resources.describe(r), g, models);
        idle[r] = mw * (static_cast<double>(idle_ns) / 1000.0) / 1000.0;
    }
    return idle;
}

}  // namespace flashsim
