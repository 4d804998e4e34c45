#pragma once

#include "flashsim/commands.hpp"
#include "flashsim/error.hpp"
#include "flashsim/models.hpp"
#include "flashsim/policy.hpp"
#include "flashsim/resources.hpp"
#include "flashsim/topology.hpp"

#include <span>
#include <vector>

namespace flashsim {

struct ScheduledEvent {
    std::uint64_t sequence_id = 0;
    EventId event_id = 0;
    FlashEvent event;
    TimeNs start = 0;
    TimeNs duration = 0;
    double energy_uj = 0.0;

    TimeNs end() const noexcept { return start + duration; }
};

struct CommandResult {
    std::uint64_t sequence_id = 0;
    CommandKind kind = CommandKind::Read;
    std::size_t line = 0;
    TimeNs arrival = 0;
    TimeNs completion = 0;
    TimeNs latency = 0;       ///< completion - arrival
    double energy_uj = 0.0;   ///< sum of the command's event energies, in event id order
    std::vector<Finding> warnings;
};

struct RunResult {
    ResourceMap resources;
    std::vector<CommandResult> commands;  ///< trace order
    std::vector<ScheduledEvent> events;   ///< ordered by (start, sequence_id, event_id)
    std::vector<Finding> warnings;        ///< trace order
    std::vector<TimeNs> busy_ns;          ///< per resource id
    std::vector<double> idle_energy_uj;   ///< per resource id
    TimeNs first_arrival = 0;
    TimeNs last_completion = 0;

    TimeNs makespan() const noexcept { return last_completion - first_arrival; }
};

/// Thrown when validation produced findings of Error severity.
class RunError : public Error {
public:
    explicit RunError(std::vector<Finding> findings);
    const std::vector<Finding>& findings() const noexcept { return findings_; }

private:
    std::vector<Finding> findings_;
};

/// Discrete-event scheduler over exclusive resources (channel buses and
/// planes, or dies under die serialization).
///
/// Each resource serves its events strictly first-in first-out in
/// (sequence_id, event id) order. An event starts at the earliest instant at
/// or after its command's arrival, the end of all its dependencies, and the
/// end of the previous event on its resource. Events without a resource start
/// as soon as they are ready.
class Engine {
public:
    Engine(const Geometry& g, const CommandSet& supported, const ModelSet& models,
           const Policy& policy);

    /// `trace` must be ordered by (arrival, sequence_id); otherwise throws
    /// Error{TraceError}. Throws RunError if validation finds errors, and
    /// model errors from the performance/power equations.
    RunResult run(std::span<const Command> trace) const;

    const ResourceMap& resources() const noexcept { return resources_; }

private:
    Geometry geometry_;
    CommandSet supported_;
    ModelSet models_;
    Policy policy_;
    ResourceMap resources_;
};

/// Duration in ns of one event under `models`, rounded to the nearest ns.
TimeNs event_duration(const FlashEvent& e, const Geometry& g, const ModelSet& models);

/// Idle energy per resource: idle power x (makespan - busy time).
std::vector<double> idle_accounting(const std::vector<TimeNs>& busy_ns, TimeNs makespan,
                                    const ResourceMap& resources, const Geometry& g,
                                    const ModelSet& models);

}  // namespace flashsim
