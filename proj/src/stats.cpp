#include "flashsim/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace flashsim {

namespace {

double us(TimeNs ns)
{
    return static_cast<double>(ns) / 1000.0;
}

std::string fixed(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string_view severity_name(Severity s)
{
    return s == Severity::Error ? "error" : "warning";
}

double sum_kinds(const Report& r)
{
    double total = 0.0;
    for (double e : r.energy_by_event_kind) total += e;
    return total;
}

double sum_idle(const Report& r)
{
    double total = 0.0;
    for (const auto& u : r.resources) total += u.idle_energy_uj;
    return total;
}

nlohmann::ordered_json event_json(const ScheduledEvent& e, const std::string& resource)
{
    nlohmann::ordered_json j;
    j["start_us"] = us(e.start);
    j["duration_us"] = us(e.duration);
    j["kind"] = to_string(e.event.kind);
    j["resource"] = resource;
    j["energy_uj"] = e.energy_uj;
    j["sequence_id"] = e.sequence_id;
    j["event_id"] = e.event_id;
    j["target"] = to_string(e.event.target);
    return j;
}

void emit_json(std::ostream& out, const Report& r, bool event_log)
{
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["format"] = kReportFormat;

    ordered_json summary;
    summary["commands"] = r.commands.size();
    summary["events"] = r.events.size();
    summary["warnings"] = r.warnings.size();
    summary["first_arrival_us"] = us(r.first_arrival);
    summary["last_completion_us"] = us(r.last_completion);
    summary["makespan_us"] = us(r.makespan);
    doc["summary"] = summary;

    ordered_json energy;
    energy["total"] = r.total_energy_uj;
    energy["events"] = r.event_energy_uj;
    energy["idle"] = r.idle_energy_uj;
    ordered_json by_kind = ordered_json::object();
    for (auto k : kAllEventKinds) {
        by_kind[std::string(to_string(k))] = r.energy_by_event_kind[static_cast<std::size_t>(k)];
    }
    energy["by_event_kind"] = by_kind;
    energy["unattached"] = r.unattached_energy_uj;
    doc["energy_uj"] = energy;

    ordered_json latency = ordered_json::array();
    for (const auto& s : r.latency) {
        ordered_json j;
        j["kind"] = to_string(s.kind);
        j["count"] = s.count;
        j["mean_us"] = s.mean_us;
        j["min_us"] = us(s.min);
        j["max_us"] = us(s.max);
        j["p50_us"] = us(s.p50);
        j["p95_us"] = us(s.p95);
        j["p99_us"] = us(s.p99);
        latency.push_back(j);
    }
    doc["latency"] = latency;

    ordered_json resources = ordered_json::array();
    for (const auto& u : r.resources) {
        ordered_json j;
        j["name"] = u.name;
        j["busy_us"] = us(u.busy_ns);
        j["utilization"] = u.utilization;
        j["active_energy_uj"] = u.active_energy_uj;
        j["idle_energy_uj"] = u.idle_energy_uj;
        resources.push_back(j);
    }
    doc["resources"] = resources;

    ordered_json warnings;
    ordered_json by_rule = ordered_json::object();
    for (const auto& [rule, n] : r.warning_counts) by_rule[std::string(to_string(rule))] = n;
    warnings["by_rule"] = by_rule;
    ordered_json list = ordered_json::array();
    for (const auto& f : r.warnings) {
        ordered_json j;
        j["sequence_id"] = f.sequence_id;
        j["line"] = f.line;
        j["rule"] = to_string(f.rule);
        j["severity"] = severity_name(f.severity);
        j["message"] = f.message;
        list.push_back(j);
    }
    warnings["list"] = list;
    doc["warnings"] = warnings;

    ordered_json commands = ordered_json::array();
    for (const auto& c : r.commands) {
        ordered_json j;
        j["sequence_id"] = c.sequence_id;
        j["line"] = c.line;
        j["kind"] = to_string(c.kind);
        j["arrival_us"] = us(c.arrival);
        j["completion_us"] = us(c.completion);
        j["latency_us"] = us(c.latency);
        j["energy_uj"] = c.energy_uj;
        j["warnings"] = c.warnings.size();
        commands.push_back(j);
    }
    doc["commands"] = commands;

    if (event_log) {
        ordered_json events = ordered_json::array();
        for (std::size_t i = 0; i < r.events.size(); ++i) {
            events.push_back(event_json(r.events[i], r.event_resource_names[i]));
        }
        doc["events"] = events;
    }
    out << doc.dump(2) << '\n';
}

void emit_table(std::ostream& out, const Report& r, bool event_log)
{
    char line[512];
    out << kReportFormat << '\n';
    out << "commands " << r.commands.size() << "  events " << r.events.size() << "  warnings "
        << r.warnings.size() << '\n';
    out << "makespan_us " << fixed(us(r.makespan), 3) << "  (" << fixed(us(r.first_arrival), 3)
        << " .. " << fixed(us(r.last_completion), 3) << ")\n";

    out << "\nlatency_us\n";
    std::snprintf(line, sizeof line, "  %-22s %8s %12s %12s %12s %12s %12s %12s\n", "kind", "count",
                  "mean", "min", "max", "p50", "p95", "p99");
    out << line;
    for (const auto& s : r.latency) {
        std::snprintf(line, sizeof line, "  %-22s %8zu %12.3f %12.3f %12.3f %12.3f %12.3f %12.3f\n",
                      std::string(to_string(s.kind)).c_str(), s.count, s.mean_us, us(s.min),
                      us(s.max), us(s.p50), us(s.p95), us(s.p99));
        out << line;
    }

    out << "\nenergy_uj\n";
    for (auto k : kAllEventKinds) {
        std::snprintf(line, sizeof line, "  %-22s %16.6f\n", std::string(to_string(k)).c_str(),
                      r.energy_by_event_kind[static_cast<std::size_t>(k)]);
        out << line;
    }
    std::snprintf(line, sizeof line, "  %-22s %16.6f\n  %-22s %16.6f\n  %-22s %16.6f\n", "events",
                  r.event_energy_uj, "idle", r.idle_energy_uj, "total", r.total_energy_uj);
    out << line;

    out << "\nresources\n";
    std::snprintf(line, sizeof line, "  %-22s %14s %12s %16s %16s\n", "name", "busy_us", "util",
                  "active_uj", "idle_uj");
    out << line;
    for (const auto& u : r.resources) {
        std::snprintf(line, sizeof line, "  %-22s %14.3f %12.4f %16.6f %16.6f\n", u.name.c_str(),
                      us(u.busy_ns), u.utilization, u.active_energy_uj, u.idle_energy_uj);
        out << line;
    }

    if (!r.warnings.empty()) {
        out << "\nwarnings\n";
        for (const auto& [rule, n] : r.warning_counts) {
            out << "  " << to_string(rule) << ' ' << n << '\n';
        }
        for (const auto& f : r.warnings) {
            out << "  line " << f.line << ": " << severity_name(f.severity) << '['
                << to_string(f.rule) << "]: " << f.message << '\n';
        }
    }

    out << "\ncommands\n";
    std::snprintf(line, sizeof line, "  %8s %-22s %14s %14s %12s %14s\n", "seq", "kind",
                  "arrival_us", "completion_us", "latency_us", "energy_uj");
    out << line;
    for (const auto& c : r.commands) {
        std::snprintf(line, sizeof line, "  %8llu %-22s %14.3f %14.3f %12.3f %14.6f\n",
                      static_cast<unsigned long long>(c.sequence_id),
                      std::string(to_string(c.kind)).c_str(), us(c.arrival), us(c.completion),
                      us(c.latency), c.energy_uj);
        out << line;
    }

    if (event_log) {
        out << "\nevents\n";
        std::snprintf(line, sizeof line, "  %14s %12s %-18s %-20s %14s %8s %4s\n", "start_us",
                      "duration_us", "kind", "resource", "energy_uj", "seq", "id");
        out << line;
        for (std::size_t i = 0; i < r.events.size(); ++i) {
            const auto& e = r.events[i];
            std::snprintf(line, sizeof line, "  %14.3f %12.3f %-18s %-20s %14.6f %8llu %4u\n",
                          us(e.start), us(e.duration), std::string(to_string(e.event.kind)).c_str(),
                          r.event_resource_names[i].c_str(), e.energy_uj,
                          static_cast<unsigned long long>(e.sequence_id), e.event_id);
            out << line;
        }
    }
}

}  // namespace

TimeNs nearest_rank(const std::vector<TimeNs>& sorted, double percent)
{
    if (sorted.empty()) return 0;
    auto rank = static_cast<std::size_t>(std::ceil(percent / 100.0 * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

Report build_report(const RunResult& run)
{
    Report r;
    r.commands = run.commands;
    r.events = run.events;
    r.warnings = run.warnings;
    r.first_arrival = run.first_arrival;
    r.last_completion = run.last_completion;
    r.makespan = run.makespan();

    const auto& res = run.resources;
    r.resources.resize(res.size());
    for (ResourceId id = 0; id < res.size(); ++id) {
        auto& u = r.resources[id];
        u.name = res.name(id);
        u.busy_ns = run.busy_ns[id];
        u.utilization = r.makespan > 0 ? static_cast<double>(u.busy_ns) / static_cast<double>(r.makespan)
                                       : 0.0;
        u.idle_energy_uj = run.idle_energy_uj[id];
    }

    r.event_resource_names.reserve(r.events.size());
    for (const auto& e : r.events) {
        r.energy_by_event_kind[static_cast<std::size_t>(e.event.kind)] += e.energy_uj;
        if (e.event.resource) {
            r.resources[*e.event.resource].active_energy_uj += e.energy_uj;
            r.event_resource_names.push_back(r.resources[*e.event.resource].name);
        } else {
            r.unattached_energy_uj += e.energy_uj;
            r.event_resource_names.emplace_back("none");
        }
    }
    r.event_energy_uj = sum_kinds(r);
    r.idle_energy_uj = sum_idle(r);
    r.total_energy_uj = r.event_energy_uj + r.idle_energy_uj;

    for (auto kind : kAllCommandKinds) {
        std::vector<TimeNs> lat;
        for (const auto& c : r.commands) {
            if (c.kind == kind) lat.push_back(c.latency);
        }
        if (lat.empty()) continue;
        std::sort(lat.begin(), lat.end());
        LatencySummary s;
        s.kind = kind;
        s.count = lat.size();
        TimeNs sum = 0;
        for (auto v : lat) sum += v;
        s.mean_us = static_cast<double>(sum) / static_cast<double>(lat.size()) / 1000.0;
        s.min = lat.front();
        s.max = lat.back();
        s.p50 = nearest_rank(lat, 50);
        s.p95 = nearest_rank(lat, 95);
        s.p99 = nearest_rank(lat, 99);
        r.latency.push_back(s);
    }

    std::array<std::size_t, 16> counts{};
    for (const auto& f : r.warnings) ++counts[static_cast<std::size_t>(f.rule)];
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] != 0) r.warning_counts.emplace_back(static_cast<Rule>(i), counts[i]);
    }
    return r;
}

bool energy_conserved(const Report& r)
{
    const double events = sum_kinds(r);
    const double idle = sum_idle(r);
    return events == r.event_energy_uj && idle == r.idle_energy_uj &&
           events + idle == r.total_energy_uj;
}

void emit(std::ostream& out, const Report& r, ReportFormat format, bool event_log)
{
    if (!energy_conserved(r)) {
        throw std::logic_error("report energy totals do not match their terms");
    }
    if (format == ReportFormat::Json) {
        emit_json(out, r, event_log);
    } else {
        emit_table(out, r, event_log);
    }
}

}  // namespace flashsim
