#include "cli.hpp"

#include "flashsim/config.hpp"
#include "flashsim/engine.hpp"
#include "flashsim/error.hpp"
#include "flashsim/stats.hpp"
#include "flashsim/trace_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace flashsim::cli {

namespace {

struct Invocation {
    std::string config_path;
    std::string trace_path;
    std::string format = "json";
    std::string out_path;
    bool events = false;
    bool check = false;
    bool strict = false;
};

std::optional<std::string> read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string_view severity_name(Severity s)
{
    return s == Severity::Error ? "error" : "warning";
}

void print_finding(std::ostream& err, const std::string& trace_path, const Finding& f)
{
    err << trace_path << ':' << f.line << ": " << severity_name(f.severity) << '['
        << to_string(f.rule) << "]: " << f.message << '\n';
}

int drive(const Invocation& inv, std::ostream& out, std::ostream& err)
{
    const auto config_text = read_file(inv.config_path);
    if (!config_text) {
        err << inv.config_path << ": error[FileNotFound]: cannot open config file\n";
        return kExitInputError;
    }
    Config cfg;
    try {
        cfg = parse_config(*config_text);
    } catch (const Error& e) {
        err << inv.config_path << ": error[" << to_string(e.code()) << "]: " << e.what() << '\n';
        return kExitInputError;
    }
    if (inv.trace_path.empty()) {
        // --check on a configuration alone
        return kExitOk;
    }

    std::ifstream trace_in(inv.trace_path, std::ios::binary);
    if (!trace_in) {
        err << inv.trace_path << ": error[FileNotFound]: cannot open trace file\n";
        return kExitInputError;
    }
    const auto parsed = parse_trace(trace_in, cfg.geometry);
    if (!parsed.ok()) {
        for (const auto& d : parsed.errors) {
            err << inv.trace_path << ':' << d.line << ": error[" << to_string(d.kind) << "]: "
                << d.message << '\n';
        }
        return kExitInputError;
    }

    Policy policy = cfg.policy;
    if (inv.strict) policy.violation_severity = Severity::Error;
    const auto findings = check_commands(parsed.commands, cfg.geometry, cfg.supported, policy);
    for (const auto& f : findings) print_finding(err, inv.trace_path, f);
    if (std::any_of(findings.begin(), findings.end(),
                    [](const Finding& f) { return is_hard_rule(f.rule); })) {
        return kExitInputError;
    }
    if (std::any_of(findings.begin(), findings.end(),
                    [](const Finding& f) { return f.severity == Severity::Error; })) {
        return kExitViolations;
    }
    if (inv.check) return kExitOk;

    std::optional<RunResult> result;
    try {
        result = Engine(cfg.geometry, cfg.supported, cfg.models, policy).run(parsed.commands);
    } catch (const Error& e) {
        err << inv.config_path << ": error[" << to_string(e.code()) << "]: " << e.what() << '\n';
        return kExitInputError;
    }
    const Report report = build_report(*result);
    const auto format = inv.format == "table" ? ReportFormat::Table : ReportFormat::Json;

    if (inv.out_path.empty()) {
        emit(out, report, format, inv.events);
        return kExitOk;
    }
    std::ofstream file(inv.out_path, std::ios::binary);
    if (!file) {
        err << inv.out_path << ": error[FileNotWritable]: cannot open output file\n";
        return kExitInputError;
    }
    emit(file, report, format, inv.events);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Trace-driven NAND flash subsystem simulator", "flashsim"};
    Invocation inv;
    app.add_option("--config", inv.config_path, "JSON configuration file")->required();
    app.add_option("--trace", inv.trace_path, "flashsim-trace v1 command trace");
    app.add_option("--format", inv.format, "report format")
        ->check(CLI::IsMember({"json", "table"}))
        ->default_val("json");
    app.add_flag("--events", inv.events, "append the event log to the report");
    app.add_flag("--check", inv.check, "validate inputs only; no simulation, no report");
    app.add_flag("--strict", inv.strict, "treat warnings as fatal (exit 1)");
    app.add_option("--out", inv.out_path, "write the report to a file instead of stdout");
    app.allow_windows_style_options(false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (inv.trace_path.empty() && !inv.check) {
            throw CLI::RequiredError("--trace");
        }
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "flashsim: error[Usage]: " << e.what() << '\n';
        return kExitInputError;
    }
    try {
        return drive(inv, out, err);
    } catch (const std::exception& e) {
        err << "flashsim: error[Internal]: " << e.what() << '\n';
        return kExitInputError;
    }
}

}  // namespace flashsim::cli
