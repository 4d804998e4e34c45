#include "flashsim/trace_io.hpp"

#include "flashsim/error.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace flashsim {

namespace {

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

template <typename T>
std::optional<T> parse_unsigned(std::string_view s)
{
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
    }
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

struct LineError {
    TraceErrorKind kind;
    std::string message;
};

class LineParser {
public:
    LineParser(std::string_view line, const Geometry& g) : line_(line), g_(g) {}

    std::optional<LineError> parse(Command& cmd)
    {
        const auto fields = split(line_, ',');
        if (fields.size() < 2) {
            return LineError{TraceErrorKind::FieldCount, "expected at least 2 fields, found " +
                                                             std::to_string(fields.size())};
        }
        const auto kind = command_kind_from_string(fields[1]);
        if (!kind) {
            return LineError{TraceErrorKind::UnknownKind,
                             "unknown command kind '" + std::string(fields[1]) + "'"};
        }
        cmd.kind = *kind;
        const std::size_t expected = (is_copy_back(*kind) || is_cache(*kind)) ? 4 : 3;
        if (fields.size() != expected) {
            return LineError{TraceErrorKind::FieldCount,
                             std::string(to_string(*kind)) + " expects " + std::to_string(expected) +
                                 " fields, found " + std::to_string(fields.size())};
        }
        const auto t = parse_time_us(fields[0]);
        if (!t) {
            return LineError{TraceErrorKind::BadNumber,
                             "bad arrival time '" + std::string(fields[0]) + "'"};
        }
        cmd.arrival = *t;

        const bool list_form = is_multi_plane(*kind) || is_interleaved(*kind);
        if (auto e = addresses(fields[2], list_form, cmd.targets)) return e;
        if (is_copy_back(*kind)) {
            if (auto e = addresses(fields[3], list_form, cmd.destinations)) return e;
            if (cmd.destinations.size() != cmd.targets.size()) {
                return LineError{TraceErrorKind::FieldCount,
                                 "source and destination lists differ in length"};
            }
        }
        if (is_cache(*kind)) {
            const auto n = parse_unsigned<std::uint32_t>(fields[3]);
            if (!n) {
                return LineError{TraceErrorKind::BadNumber,
                                 "bad page count '" + std::string(fields[3]) + "'"};
            }
            cmd.page_count = *n;
        }
        return std::nullopt;
    }

private:
    std::optional<LineError> addresses(std::string_view field, bool list_form,
                                       std::vector<FlashAddress>& out)
    {
        const auto items = list_form ? split(field, ';') : std::vector<std::string_view>{field};
        for (auto item : items) {
            FlashAddress a;
            if (auto e = address(item, a)) return e;
            out.push_back(a);
        }
        return std::nullopt;
    }

    std::optional<LineError> address(std::string_view text, FlashAddress& a)
    {
        if (text.find('.') == std::string_view::npos) {
            const auto flat = parse_unsigned<std::uint64_t>(text);
            if (!flat) {
                return LineError{TraceErrorKind::BadNumber, "bad address '" + std::string(text) + "'"};
            }
            if (*flat >= g_.total_pages()) {
                return LineError{TraceErrorKind::AddressRange,
                                 "flat address " + std::string(text) + " out of range [0, " +
                                     std::to_string(g_.total_pages()) + ")"};
            }
            a = decode(*flat, g_);
            return std::nullopt;
        }
        const auto parts = split(text, '.');
        if (parts.size() != 6) {
            return LineError{TraceErrorKind::BadNumber,
                             "address '" + std::string(text) + "' needs 6 dot-separated indices"};
        }
        std::array<std::uint32_t, 6> d{};
        for (std::size_t i = 0; i < 6; ++i) {
            const auto v = parse_unsigned<std::uint32_t>(parts[i]);
            if (!v) {
                return LineError{TraceErrorKind::BadNumber, "bad address '" + std::string(text) + "'"};
            }
            d[i] = *v;
        }
        a = FlashAddress{d[0], d[1], d[2], d[3], d[4], d[5]};
        if (!in_range(a, g_)) {
            try {
                encode(a, g_);
            } catch (const Error& e) {
                return LineError{TraceErrorKind::AddressRange, e.what()};
            }
        }
        return std::nullopt;
    }

    std::string_view line_;
    const Geometry& g_;
};

}  // namespace

std::string_view to_string(TraceErrorKind kind)
{
    switch (kind) {
        case TraceErrorKind::BadHeader: return "BadHeader";
        case TraceErrorKind::FieldCount: return "FieldCount";
        case TraceErrorKind::BadNumber: return "BadNumber";
        case TraceErrorKind::UnknownKind: return "UnknownKind";
        case TraceErrorKind::AddressRange: return "AddressRange";
    }
    return "Unknown";
}

std::optional<TimeNs> parse_time_us(std::string_view text)
{
    text = trim(text);
    const auto dot = text.find('.');
    const auto whole = text.substr(0, dot);
    const auto frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (dot != std::string_view::npos && (frac.empty() || frac.size() > 3)) return std::nullopt;
    const auto us = parse_unsigned<std::int64_t>(whole);
    if (!us) return std::nullopt;
    std::int64_t ns_part = 0;
    if (!frac.empty()) {
        const auto f = parse_unsigned<std::int64_t>(frac);
        if (!f) return std::nullopt;
        ns_part = *f;
        for (std::size_t i = frac.size(); i < 3; ++i) ns_part *= 10;
    }
    TimeNs ns = 0;
    if (__builtin_mul_overflow(*us, std::int64_t{1000}, &ns) ||
        __builtin_add_overflow(ns, ns_part, &ns)) {
        return std::nullopt;
    }
    return ns;
}

std::string format_time_us(TimeNs ns)
{
    std::string s = std::to_string(ns / 1000);
    const auto rem = ns % 1000;
    if (rem != 0) {
        std::string frac = std::to_string(rem);
        frac.insert(0, 3 - frac.size(), '0');
        while (frac.back() == '0') frac.pop_back();
        s += '.';
        s += frac;
    }
    return s;
}

TraceParseResult parse_trace(std::istream& in, const Geometry& g)
{
    validate_geometry(g);
    TraceParseResult result;
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::uint64_t ordinal = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line == kTraceHeader) continue;
            result.errors.push_back({line_no, TraceErrorKind::BadHeader,
                                     "expected header '" + std::string(kTraceHeader) + "'"});
        }
        Command cmd;
        cmd.line = line_no;
        cmd.sequence_id = ordinal++;
        if (auto err = LineParser(line, g).parse(cmd)) {
            result.errors.push_back({line_no, err->kind, std::move(err->message)});
            continue;
        }
        result.commands.push_back(std::move(cmd));
    }
    if (!header_seen) {
        result.errors.push_back({line_no, TraceErrorKind::BadHeader,
                                 "missing header '" + std::string(kTraceHeader) + "'"});
    }
    std::stable_sort(result.commands.begin(), result.commands.end(),
                     [](const Command& a, const Command& b) { return a.arrival < b.arrival; });
    return result;
}

TraceParseResult parse_trace(std::string_view text, const Geometry& g)
{
    std::istringstream in{std::string(text)};
    return parse_trace(in, g);
}

void write_trace(std::ostream& out, std::span<const Command> commands)
{
    std::vector<const Command*> order;
    order.reserve(commands.size());
    for (const auto& c : commands) order.push_back(&c);
    std::stable_sort(order.begin(), order.end(), [](const Command* a, const Command* b) {
        return a->sequence_id < b->sequence_id;
    });

    auto list = [](const std::vector<FlashAddress>& addrs) {
        std::string s;
        for (std::size_t i = 0; i < addrs.size(); ++i) {
            if (i) s += ';';
            s += to_string(addrs[i]);
        }
        return s;
    };

    out << kTraceHeader << '\n';
    for (const Command* c : order) {
        out << format_time_us(c->arrival) << ',' << to_string(c->kind) << ',' << list(c->targets);
        if (is_copy_back(c->kind)) out << ',' << list(c->destinations);
        if (is_cache(c->kind)) out << ',' << c->page_count;
        out << '\n';
    }
}

}  // namespace flashsim
