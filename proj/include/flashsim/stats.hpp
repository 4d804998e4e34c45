#pragma once

#include "flashsim/engine.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace flashsim {

inline constexpr std::string_view kReportFormat = "flashsim-report v1";

struct LatencySummary {
    CommandKind kind = CommandKind::Read;
    std::size_t count = 0;
    double mean_us = 0.0;
    TimeNs min = 0;
    TimeNs max = 0;
    TimeNs p50 = 0;  // nearest rank
    TimeNs p95 = 0;
    TimeNs p99 = 0;
};

struct ResourceUsage {
    std::string name;
    TimeNs busy_ns = 0;
    double utilization = 0.0;       ///< busy / makespan, 0 for an empty run
    double active_energy_uj = 0.0;
    double idle_energy_uj = 0.0;
};

/// Aggregated view of one run.
///
/// Energy accumulation order, which makes the totals exactly reproducible:
/// each per-kind total sums its events in event-log order starting from 0;
/// `event_energy_uj` sums the per-kind totals in EventKind order;
/// `idle_energy_uj` sums idle energies in resource id order; and
/// `total_energy_uj = event_energy_uj + idle_energy_uj`.
struct Report {
    std::vector<CommandResult> commands;
    std::vector<ScheduledEvent> events;
    std::vector<std::string> event_resource_names;  ///< parallel to events, "none" if unattached
    std::vector<LatencySummary> latency;            ///< CommandKind order, kinds present only
    std::array<double, kEventKindCount> energy_by_event_kind{};
    double unattached_energy_uj = 0.0;              ///< events that occupy no resource
    std::vector<ResourceUsage> resources;           ///< resource id order
    std::vector<Finding> warnings;
    std::vector<std::pair<Rule, std::size_t>> warning_counts;  ///< Rule order, nonzero only
    TimeNs first_arrival = 0;
    TimeNs last_completion = 0;
    TimeNs makespan = 0;
    double event_energy_uj = 0.0;
    double idle_energy_uj = 0.0;
    double total_energy_uj = 0.0;
};

Report build_report(const RunResult& run);

/// Nearest-rank percentile of an ascending sample; 0 for an empty one.
TimeNs nearest_rank(const std::vector<TimeNs>& sorted, double percent);

/// Recomputes the totals from the per-kind and idle terms in the documented
/// order and compares bit for bit.
bool energy_conserved(const Report& r);

enum class ReportFormat : std::uint8_t { Json, Table };

/// Throws std::logic_error if energy_conserved() fails.
void emit(std::ostream& out, const Report& r, ReportFormat format, bool event_log);

}  // namespace flashsim
