#include "apf/harness.hpp"
#include "apf/simulator.hpp"

#include <gtest/gtest.h>

using namespace apf;

namespace {

Point P(Scalar x, Scalar y) { return {std::move(x), std::move(y)}; }

Configuration config(std::initializer_list<std::pair<Point, Light>> rs)
{
    Configuration c;
    for (const auto& [p, l] : rs) c.robots.push_back({p, l, 1});
    return c;
}

TraceEvent event(EventKind kind, std::size_t robot, Point pos, Light light = Light::off)
{
    TraceEvent e;
    e.kind = kind;
    e.robot = robot;
    e.position = std::move(pos);
    e.light = light;
    return e;
}

bool has(const std::vector<Violation>& v, const std::string& m)
{
    for (const Violation& x : v) {
        if (x.monitor == m) return true;
    }
    return false;
}

MonitorState fresh(const Configuration& c)
{
    MonitorState s;
    s.enabled = default_monitors();
    s.enabled.push_back("phase");
    s.prev_positions = c.centers();
    return s;
}

}  // namespace

TEST(Truncate, StopsAtRequestedLength)
{
    const auto out = truncate_move({P(0, 0), P(5, 0)}, 2, Scalar(1, 2));
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out.back(), P(2, 0));
}

TEST(Truncate, ShortMoveCompletes)
{
    const auto out = truncate_move({P(0, 0), P(Scalar(1, 4), 0)}, 0, Scalar(1, 2));
    EXPECT_EQ(out.back(), P(Scalar(1, 4), 0));
}

TEST(Truncate, RaisedToDelta)
{
    const auto out = truncate_move({P(0, 0), P(5, 0)}, Scalar(1, 10), Scalar(1, 2));
    EXPECT_EQ(out.back(), P(Scalar(1, 2), 0));
}

TEST(Truncate, KeepsPassedWaypoints)
{
    const auto out = truncate_move({P(0, 0), P(0, -1), P(3, -1)}, 2, Scalar(1, 4));
    EXPECT_EQ(out, (std::vector<Point>{P(0, 0), P(0, -1), P(1, -1)}));
}

TEST(Truncate, RequestBeyondTotalEndsAtTarget)
{
    const auto out = truncate_move({P(0, 0), P(0, 3)}, 10, Scalar(1, 4));
    EXPECT_EQ(out.back(), P(0, 3));
}

TEST(Truncate, IrrationalSegmentIsNeverCut)
{
    const auto out = truncate_move({P(0, 0), P(1, 1), P(2, 1)}, Scalar(1, 2), Scalar(1, 4));
    EXPECT_EQ(out, (std::vector<Point>{P(0, 0), P(1, 1)}));
}

TEST(Monitors, M1FlagsCloseStop)
{
    const auto now = config({{P(0, 0), Light::off}, {P(Scalar(9, 10), 0), Light::off}});
    MonitorState s = fresh(config({{P(0, 0), Light::off}, {P(2, 0), Light::off}}));
    const auto v = monitor_step(s, now, event(EventKind::MoveEnd, 1, P(Scalar(9, 10), 0)), 0, {false, false});
    EXPECT_TRUE(has(v, "M1"));
}

TEST(Monitors, M1FlagsPassThrough)
{
    // Both endpoints are far apart but the straight motion passes within 1/2.
    const auto now = config({{P(0, 0), Light::off}, {P(Scalar(1, 2), -3), Light::off}});
    MonitorState s = fresh(config({{P(0, 0), Light::off}, {P(Scalar(1, 2), 3), Light::off}}));
    const auto v = monitor_step(s, now, event(EventKind::MoveEnd, 1, P(Scalar(1, 2), -3)), 0, {false, false});
    EXPECT_TRUE(has(v, "M1"));
}

TEST(Monitors, M1AllowsTangentDisks)
{
    const auto now = config({{P(0, 0), Light::off}, {P(1, 0), Light::off}});
    MonitorState s = fresh(config({{P(0, 0), Light::off}, {P(3, 0), Light::off}}));
    EXPECT_TRUE(monitor_step(s, now, event(EventKind::MoveEnd, 1, P(1, 0)), 0, {false, false}).empty());
}

TEST(Monitors, M3FlagsCrowdedElection)
{
    const auto c = config({{P(0, 0), Light::terminal}, {P(0, 2), Light::terminal}, {P(Scalar(3, 2), 5), Light::off}});
    MonitorState s = fresh(c);
    TraceEvent e = event(EventKind::LookDone, 0, P(0, 0), Light::terminal);
    e.branch = "elect_leader";
    EXPECT_TRUE(has(monitor_step(s, c, e, 0, {false, false, false}), "M3"));

    const auto ok = config({{P(0, 0), Light::terminal}, {P(0, 2), Light::terminal}, {P(2, 5), Light::off}});
    MonitorState s2 = fresh(ok);
    EXPECT_FALSE(has(monitor_step(s2, ok, e, 0, {false, false, false}), "M3"));
}

TEST(Monitors, M6FlagsLeaderBesideTerminal)
{
    const auto c = config({{P(0, 0), Light::leader}, {P(0, 2), Light::terminal}, {P(3, 0), Light::off}});
    MonitorState s = fresh(c);
    TraceEvent e = event(EventKind::LightSet, 0, P(0, 0), Light::leader);
    e.previous_light = Light::switch_off;
    EXPECT_TRUE(has(monitor_step(s, c, e, 0, {false, false, false}), "M6"));
}

TEST(Monitors, M2FlagsTwoLeaders)
{
    const auto c = config({{P(0, 0), Light::leader}, {P(0, 4), Light::leader}, {P(3, 0), Light::off}});
    MonitorState s = fresh(c);
    TraceEvent e = event(EventKind::LightSet, 1, P(0, 4), Light::leader);
    e.previous_light = Light::switch_off;
    EXPECT_TRUE(has(monitor_step(s, c, e, 0, {false, false, false}), "M2"));
}

TEST(Monitors, M4FlagsUnknownTransition)
{
    const auto c = config({{P(0, 0), Light::failed}, {P(3, 0), Light::off}});
    MonitorState s = fresh(c);
    TraceEvent e = event(EventKind::LightSet, 0, P(0, 0), Light::failed);
    e.previous_light = Light::off;
    EXPECT_TRUE(has(monitor_step(s, c, e, 0, {false, false}), "M4"));
}

TEST(Monitors, M5FlagsConcurrentStage2Moves)
{
    const auto c = config({{P(0, 0), Light::leader}, {P(3, 0), Light::off}, {P(6, 0), Light::off}});
    MonitorState s = fresh(c);
    s.stage2 = true;
    EXPECT_TRUE(has(monitor_step(s, c, event(EventKind::ComputeDone, 1, P(3, 0)), 0, {false, true, true}), "M5"));
    EXPECT_FALSE(has(monitor_step(s, c, event(EventKind::ComputeDone, 1, P(3, 0)), 1, {false, true, false}), "M5"));
}

TEST(Transitions, Closure)
{
    EXPECT_TRUE(allowed_transition(Light::off, Light::terminal));
    EXPECT_TRUE(allowed_transition(Light::switch_off, Light::leader));
    EXPECT_TRUE(allowed_transition(Light::leader, Light::done));
    EXPECT_TRUE(allowed_transition(Light::ready, Light::ready));
    EXPECT_FALSE(allowed_transition(Light::failed, Light::ready));
    EXPECT_FALSE(allowed_transition(Light::done, Light::off));
    EXPECT_FALSE(allowed_transition(Light::leader, Light::off));
}

TEST(Preconditions, RejectsUnsolvableSymmetry)
{
    const auto c = config({{P(0, 1), Light::off}, {P(0, -1), Light::off}, {P(3, 1), Light::off}, {P(3, -1), Light::off}});
    const Pattern p{{P(0, 0), P(1, 0), P(2, 0), P(3, 1)}};
    EXPECT_THROW(check_run_preconditions(c, p), std::invalid_argument);
}

TEST(Preconditions, RejectsLitStartAndOverlap)
{
    const Pattern p{{P(0, 0), P(1, 0), P(0, 2)}};
    EXPECT_THROW(check_run_preconditions(config({{P(0, 0), Light::ready}, {P(2, 0), Light::off}, {P(0, 3), Light::off}}), p),
                 std::invalid_argument);
    EXPECT_THROW(
        check_run_preconditions(config({{P(0, 0), Light::off}, {P(Scalar(1, 2), 0), Light::off}, {P(0, 3), Light::off}}), p),
        std::invalid_argument);
    EXPECT_NO_THROW(check_run_preconditions(config({{P(0, 0), Light::off}, {P(2, 0), Light::off}, {P(0, 3), Light::off}}), p));
}

TEST(CountMoves, CountsOnlyDisplacingMoves)
{
    Trace t;
    t.initial = config({{P(0, 0), Light::off}, {P(3, 0), Light::off}});
    t.events.push_back(event(EventKind::ComputeDone, 0, P(0, 0)));
    t.events.push_back(event(EventKind::MoveEnd, 0, P(-1, 0)));
    t.events.push_back(event(EventKind::ComputeDone, 1, P(3, 0)));
    t.events.push_back(event(EventKind::MoveEnd, 1, P(3, 0)));
    EXPECT_EQ(count_moves(t), 1u);
    EXPECT_EQ(replay(t).robots[0].center, P(-1, 0));
}

class Runs : public ::testing::Test {
protected:
    static SimParams params(std::uint64_t seed, Mode mode = Mode::async)
    {
        SimParams p;
        p.seed = seed;
        p.mode = mode;
        p.max_events = 200000;
        return p;
    }
};

TEST_F(Runs, DeterministicPerSeed)
{
    const Instance inst = generate_instance(5, 77);
    const RunResult a = simulate(inst.config, inst.pattern, params(3));
    const RunResult b = simulate(inst.config, inst.pattern, params(3));
    const RunResult c = simulate(inst.config, inst.pattern, params(4));
    EXPECT_EQ(serialize_trace(a.trace), serialize_trace(b.trace));
    EXPECT_NE(serialize_trace(a.trace), serialize_trace(c.trace));
}

TEST_F(Runs, TraceRoundTripAndReplay)
{
    const Instance inst = generate_instance(4, 5);
    const RunResult r = simulate(inst.config, inst.pattern, params(9));
    ASSERT_EQ(r.status, RunStatus::final);
    const std::string text = serialize_trace(r.trace);
    const Trace back = parse_trace(text);
    EXPECT_EQ(serialize_trace(back), text);
    EXPECT_EQ(replay(back).centers(), r.final_config.centers());
    EXPECT_EQ(count_moves(back), r.moves);
}

TEST_F(Runs, FormsPatternInBothModes)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Instance inst = generate_instance(6, seed);
        for (Mode m : {Mode::async, Mode::ssync}) {
            const RunResult r = simulate(inst.config, inst.pattern, params(seed, m));
            ASSERT_EQ(r.status, RunStatus::final) << "seed " << seed << " " << to_string(m);
            EXPECT_TRUE(r.violations.empty());
            EXPECT_TRUE(find_similarity(r.final_config.centers(), inst.pattern.targets).has_value());
            for (const Robot& x : r.final_config.robots) EXPECT_EQ(x.light, Light::done);
        }
    }
}

TEST_F(Runs, CollinearStartOfThreeForms)
{
    const Instance inst = generate_collinear_instance(3, 2);
    const RunResult r = simulate(inst.config, inst.pattern, params(2));
    ASSERT_EQ(r.status, RunStatus::final);
    EXPECT_TRUE(find_similarity(r.final_config.centers(), inst.pattern.targets).has_value());
    EXPECT_GE(r.moves, 1u);
}

TEST_F(Runs, CollinearSsyncLateInteriorDoesNotStall)
{
    // The top terminal used to leave before its neighbour turned interior.
    const Instance inst = generate_collinear_instance(9, 5);
    const RunResult r = simulate(inst.config, inst.pattern, params(5, Mode::ssync));
    ASSERT_EQ(r.status, RunStatus::final);
    EXPECT_TRUE(find_similarity(r.final_config.centers(), inst.pattern.targets).has_value());
    EXPECT_GE(r.moves, 7u);
}

TEST_F(Runs, AsyncLooksObserveMotion)
{
    std::uint64_t seen = 0;
    for (std::uint64_t seed = 1; seed <= 10 && seen == 0; ++seed) {
        const Instance inst = generate_instance(6, seed);
        seen += simulate(inst.config, inst.pattern, params(seed)).looks_seeing_motion;
    }
    EXPECT_GT(seen, 0u);
}

TEST_F(Runs, SsyncLooksHappenOnRoundBoundaries)
{
    const Instance inst = generate_instance(5, 3);
    const RunResult r = simulate(inst.config, inst.pattern, params(3, Mode::ssync));
    ASSERT_EQ(r.status, RunStatus::final);
    for (const TraceEvent& e : r.trace.events) {
        if (e.kind == EventKind::LookDone) EXPECT_EQ(e.time.get_den(), 1u);
    }
}

TEST_F(Runs, BudgetExhaustionThrowsFromRun)
{
    const Instance inst = generate_instance(5, 1);
    SimParams p = params(1);
    p.max_events = 10;
    EXPECT_EQ(simulate(inst.config, inst.pattern, p).status, RunStatus::budget);
    try {
        run(inst.config, inst.pattern, p);
        FAIL() << "expected SimulationError";
    } catch (const SimulationError& e) {
        EXPECT_EQ(e.result().trace.events.size(), 10u);
    }
}

TEST(TraceIo, MalformedLineReportsLineNumber)
{
    try {
        parse_trace("{\"mode\":\"async\"}\nnot json\n");
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
    }
}
