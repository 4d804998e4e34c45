#include "flashsim/engine.hpp"

#include "oracle.hpp"
#include "random_trace.hpp"

#include <doctest.h>

#include <numeric>

using namespace flashsim;

namespace {

const Geometry kGeo{2, 2, 2, 2, 4, 8, 4096, 128};

Command cmd(CommandKind kind, std::vector<FlashAddress> targets, TimeNs arrival = 0,
            std::uint32_t pages = 1, std::vector<FlashAddress> dst = {})
{
    Command c;
    c.kind = kind;
    c.targets = std::move(targets);
    c.destinations = std::move(dst);
    c.page_count = pages;
    c.arrival = arrival;
    return c;
}

RunResult run(std::vector<Command> trace, const ModelSet& m = ModelSet::defaults(),
              const Policy& p = {}, const Geometry& g = kGeo)
{
    for (std::size_t i = 0; i < trace.size(); ++i) trace[i].sequence_id = i;
    return Engine(g, CommandSet::all(), m, p).run(trace);
}

TimeNs latency_of(std::vector<Command> trace, const ModelSet& m = ModelSet::defaults(),
                  const Policy& p = {})
{
    return run(std::move(trace), m, p).commands.at(0).latency;
}

const FlashAddress kOrigin{};

}  // namespace

TEST_CASE("fixture latencies")
{
    // sense 25 + transfer 4096 * 0.025
    CHECK(latency_of({cmd(CommandKind::Read, {kOrigin})}) == 127'400);
    // 25 + 2 * max(25, 102.4) + 102.4
    CHECK(latency_of({cmd(CommandKind::CacheRead, {kOrigin}, 0, 3)}) == 332'200);
    CHECK(latency_of({cmd(CommandKind::CacheRead, {kOrigin}, 0, 1)}) ==
          latency_of({cmd(CommandKind::Read, {kOrigin})}));
    // two senses overlap, transfers share bus 0
    CHECK(latency_of({cmd(CommandKind::MultiPlaneRead, {kOrigin, {0, 0, 0, 1, 0, 0}})}) == 229'800);
    // transfer 102.4 then program 200
    CHECK(latency_of({cmd(CommandKind::Write, {kOrigin})}) == 302'400);
    CHECK(latency_of({cmd(CommandKind::Erase, {kOrigin})}) == 1'500'000);
    // sense 25, free buffer copy, program 200
    CHECK(latency_of({cmd(CommandKind::CopyBack, {{0, 0, 0, 0, 0, 1}}, 0, 1, {{0, 0, 0, 0, 1, 3}})}) ==
          225'000);
}

TEST_CASE("serial reads take three full read latencies")
{
    const auto r = run({cmd(CommandKind::Read, {kOrigin}, 0), cmd(CommandKind::Read, {kOrigin}, 127'400),
                        cmd(CommandKind::Read, {kOrigin}, 254'800)});
    CHECK(r.last_completion == 382'200);
    CHECK(r.makespan() == 382'200);
}

TEST_CASE("empty trace")
{
    const auto r = run({});
    CHECK(r.commands.empty());
    CHECK(r.events.empty());
    CHECK(r.makespan() == 0);
    CHECK(std::accumulate(r.idle_energy_uj.begin(), r.idle_energy_uj.end(), 0.0) == 0.0);
}

TEST_CASE("energies per event")
{
    const auto r = run({cmd(CommandKind::Read, {kOrigin})});
    REQUIRE(r.events.size() == 3);
    CHECK(r.commands[0].energy_uj == doctest::Approx(2.798).epsilon(1e-12));
    for (const auto& e : r.events) {
        if (e.event.kind == EventKind::ArraySense) CHECK(e.energy_uj == doctest::Approx(0.75));
        if (e.event.kind == EventKind::BusTransferOut) CHECK(e.energy_uj == doctest::Approx(2.048));
    }
}

TEST_CASE("idle accounting")
{
    auto m = ModelSet::defaults();
    SUBCASE("no idle power")
    {
        const auto r = run({cmd(CommandKind::Read, {kOrigin})}, m);
        for (double e : r.idle_energy_uj) CHECK(e == 0.0);
    }
    SUBCASE("1 mW on the buses")
    {
        m.set_idle(IdleClass::Bus, BuiltIn{1.0});
        const auto r = run({cmd(CommandKind::Read, {kOrigin})}, m);
        // unused second channel: 1 mW x 127.4 us
        CHECK(r.idle_energy_uj[r.resources.bus(1)] == doctest::Approx(0.1274).epsilon(1e-12));
        // used channel idles for the 25 us sense
        CHECK(r.idle_energy_uj[r.resources.bus(0)] == doctest::Approx(0.025).epsilon(1e-12));
        CHECK(r.idle_energy_uj[r.resources.array_unit(kOrigin)] == 0.0);
    }
    SUBCASE("saturated resource has no idle energy")
    {
        m.set_idle(IdleClass::Array, BuiltIn{3.0});
        const auto r = run({cmd(CommandKind::Erase, {kOrigin})}, m);
        CHECK(r.busy_ns[r.resources.array_unit(kOrigin)] == r.makespan());
        CHECK(r.idle_energy_uj[r.resources.array_unit(kOrigin)] == 0.0);
        CHECK(r.idle_energy_uj[r.resources.array_unit({0, 0, 0, 1, 0, 0})] ==
              doctest::Approx(3.0 * 1500 / 1000));
    }
}

TEST_CASE("policy switches")
{
    const std::vector<Command> erase2 = {cmd(CommandKind::MultiPlaneErase, {kOrigin, {0, 0, 0, 1, 0, 0}})};
    CHECK(latency_of(erase2) == 1'500'000);
    Policy serial;
    serial.die_serialization = true;
    CHECK(latency_of(erase2, ModelSet::defaults(), serial) == 3'000'000);

    auto m = ModelSet::defaults();
    m.set_latency(EventKind::CmdOverhead, BuiltIn{5.0});
    CHECK(latency_of({cmd(CommandKind::Read, {kOrigin})}, m) == 132'400);
    // the overhead on bus 0 delays a transfer waiting behind it
    Policy on_bus;
    on_bus.cmd_overhead_on_bus = true;
    const auto r = run({cmd(CommandKind::Read, {kOrigin}), cmd(CommandKind::Write, {{0, 1, 0, 0, 0, 0}})}, m, on_bus);
    for (const auto& e : r.events) {
        if (e.sequence_id == 0 && e.event.kind == EventKind::CmdOverhead) {
            CHECK(e.start == 0);
            CHECK(e.event.resource == r.resources.bus(0));
        }
    }
}

TEST_CASE("resources are served in trace order")
{
    // a write on the plane queues the later read behind its program
    const auto r = run({cmd(CommandKind::Write, {kOrigin}), cmd(CommandKind::Read, {{0, 0, 0, 0, 1, 0}})});
    TimeNs program_end = 0;
    TimeNs sense_start = 0;
    for (const auto& e : r.events) {
        if (e.event.kind == EventKind::ArrayProgram) program_end = e.end();
        if (e.event.kind == EventKind::ArraySense) sense_start = e.start;
    }
    CHECK(program_end == 302'400);
    CHECK(sense_start == program_end);
}

TEST_CASE("errors")
{
    std::vector<Command> unsorted = {cmd(CommandKind::Read, {kOrigin}, 10), cmd(CommandKind::Read, {kOrigin}, 5)};
    unsorted[1].sequence_id = 1;
    const Engine engine(kGeo, CommandSet::all(), ModelSet::defaults(), {});
    CHECK_THROWS_AS(engine.run(unsorted), Error);

    std::vector<Command> bad = {cmd(CommandKind::Read, {{0, 0, 0, 0, 7, 0}})};
    try {
        engine.run(bad);
        FAIL("expected RunError");
    } catch (const RunError& e) {
        REQUIRE(e.findings().size() == 1);
        CHECK(e.findings()[0].rule == Rule::AddressRange);
    }

    Policy strict;
    strict.violation_severity = Severity::Error;
    std::vector<Command> twice = {cmd(CommandKind::Write, {kOrigin}), cmd(CommandKind::Write, {kOrigin})};
    twice[1].sequence_id = 1;
    CHECK_THROWS_AS(Engine(kGeo, CommandSet::all(), ModelSet::defaults(), strict).run(twice), RunError);
    const auto warned = Engine(kGeo, CommandSet::all(), ModelSet::defaults(), {}).run(twice);
    REQUIRE(warned.warnings.size() == 1);
    CHECK(warned.commands[1].warnings.size() == 1);
    CHECK(warned.commands[0].warnings.empty());

    CHECK_THROWS_AS(Engine(kGeo, CommandSet::legacy(), ModelSet::defaults(), {})
                        .run(std::vector{cmd(CommandKind::CacheRead, {kOrigin}, 0, 2)}),
                    RunError);
}

TEST_CASE("random schedules are legal, deterministic and match the oracle")
{
    testing::Rng rng(2024);
    for (int round = 0; round < 30; ++round) {
        const Geometry g = testing::random_geometry(rng, 2);
        const auto models = testing::random_builtin_models(rng);
        Policy p;
        p.die_serialization = rng() % 4 == 0;
        p.cmd_overhead_on_bus = rng() % 3 == 0;
        const auto trace = testing::random_trace(rng, g, 15, 400'000);
        const Engine engine(g, CommandSet::all(), models, p);
        const auto a = engine.run(trace);
        const auto b = engine.run(trace);
        CHECK(testing::schedule_violations(a, trace).empty());

        REQUIRE(a.events.size() == b.events.size());
        for (std::size_t i = 0; i < a.events.size(); ++i) {
            CHECK(a.events[i].start == b.events[i].start);
            CHECK(a.events[i].energy_uj == b.events[i].energy_uj);
        }

        const auto oracle = testing::brute_force_schedule(trace, g, models, p);
        REQUIRE(oracle.size() == a.events.size());
        for (std::size_t i = 0; i < oracle.size(); ++i) {
            CHECK(oracle[i].sequence_id == a.events[i].sequence_id);
            CHECK(oracle[i].event_id == a.events[i].event_id);
            CHECK(oracle[i].start == a.events[i].start);
            CHECK(oracle[i].end == a.events[i].end());
        }
        for (const auto& c : a.commands) {
            TimeNs longest = 0;
            for (const auto& e : a.events) {
                if (e.sequence_id == c.sequence_id) longest = std::max(longest, e.duration);
            }
            CHECK(c.latency >= longest);
        }
    }
}

TEST_CASE("parallel speedup and pipeline bounds")
{
    testing::Rng rng(99);
    for (int round = 0; round < 200; ++round) {
        const auto m = testing::random_builtin_models(rng);
        const FlashAddress a{0, 1, 1, 0, 2, 2};
        const std::uint32_t k = 2;
        std::vector<FlashAddress> planes = {a, {0, 1, 1, 1, 2, 2}};
        const std::vector<std::pair<CommandKind, CommandKind>> pairs = {
            {CommandKind::MultiPlaneRead, CommandKind::Read},
            {CommandKind::MultiPlaneWrite, CommandKind::Write},
            {CommandKind::MultiPlaneErase, CommandKind::Erase}};
        for (const auto& [multi, single] : pairs) {
            const TimeNs one = latency_of({cmd(single, {a})}, m);
            const TimeNs many = latency_of({cmd(multi, planes)}, m);
            CHECK(many >= one);
            CHECK(many <= k * one);
        }
        const TimeNs read = latency_of({cmd(CommandKind::Read, {a})}, m);
        CHECK(latency_of({cmd(CommandKind::CacheRead, {a}, 0, 1)}, m) == read);
        for (std::uint32_t n = 2; n <= 6; ++n) {
            CHECK(latency_of({cmd(CommandKind::CacheRead, {a}, 0, n)}, m) <= n * read);
        }
    }
}
