#include "apf/robot_algorithm.hpp"

#include "support/random_configs.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace apf;

namespace {

struct Seen {
    Scalar x, y;
    Light light = Light::off;
};

LocalSnapshot snap(Light self, std::size_t n, std::initializer_list<Seen> others)
{
    LocalSnapshot s;
    s.self_light = self;
    s.n = n;
    for (const Seen& o : others) s.visible.push_back({{o.x, o.y}, o.light});
    return s;
}

Point P(Scalar x, Scalar y) { return {std::move(x), std::move(y)}; }

Pattern tri() { return Pattern{{P(0, 0), P(0, 3), P(4, 0)}}; }

}  // namespace

TEST(Dispatch, VisibleLeaderSelectsStage2)
{
    const auto s = snap(Light::off, 3, {{3, 4, Light::leader}, {2, 0}});
    EXPECT_EQ(compute(s, tri()).branch, Branch::stage2);
}

TEST(Dispatch, VisibleReadySelectsPhase2)
{
    const auto s = snap(Light::off, 4, {{0, 1}, {-2, 0, Light::ready}, {3, 0}});
    EXPECT_EQ(compute(s, Pattern{{P(0, 0), P(1, 0), P(2, 0), P(3, 0)}}).branch, Branch::phase2);
}

TEST(Dispatch, AllOffSelectsPhase1)
{
    const auto s = snap(Light::off, 3, {{0, 1}, {3, 0}});
    EXPECT_EQ(compute(s, tri()).branch, Branch::phase1);
}

TEST(Dispatch, SeparatedTerminalPairSelectsPhase2)
{
    // First batch: two terminal-lit robots; second batch (n+3)/2 = 3 away and uniformly off.
    const auto s = snap(Light::off, 3, {{-3, 0, Light::terminal}, {-3, 2, Light::terminal}});
    const auto d = compute(s, tri());
    EXPECT_EQ(d.branch, Branch::phase2);
}

TEST(Phase1, SoleFirstBatchRobotBecomesLeader)
{
    const auto s = snap(Light::off, 3, {{3, 2}, {3, -1}});
    const Decision d = phase1_compute(s);
    EXPECT_EQ(d.branch, Branch::become_leader);
    ASSERT_EQ(d.plan.waypoints.size(), 1u);
    EXPECT_EQ(d.plan.waypoints[0], P(0, -3));  // both directions free: local down
}

TEST(Phase1, FirstBatchRobotsLightUp)
{
    const auto bottom = snap(Light::off, 4, {{0, 1}, {0, 2}, {3, 0}});
    EXPECT_EQ(phase1_compute(bottom).new_light, Light::terminal);
    const auto middle = snap(Light::off, 4, {{0, -1}, {0, 1}, {3, 0}});
    EXPECT_EQ(phase1_compute(middle).new_light, Light::interior);
}

TEST(Phase1, TerminalWithInteriorOnAxisMovesHalfNPlus3Left)
{
    const auto s = snap(Light::terminal, 5, {{0, 1, Light::interior}, {0, 2, Light::terminal}, {3, 0}, {3, 2}});
    const Decision d = phase1_compute(s);
    ASSERT_EQ(d.plan.waypoints.size(), 1u);
    EXPECT_EQ(d.plan.waypoints[0], P(-4, 0));
    EXPECT_EQ(d.new_light, Light::terminal);
}

TEST(Phase1, TerminalAlignsWithTerminalOnLeft)
{
    const auto s = snap(Light::terminal, 5, {{-4, 1, Light::terminal}, {3, 0}, {3, 2}, {3, 4}});
    const Decision d = phase1_compute(s);
    ASSERT_EQ(d.plan.waypoints.size(), 1u);
    EXPECT_EQ(d.plan.waypoints[0], P(-4, 0));
}

TEST(Phase1, TerminalWaitsForOffNeighbourBeforeAligning)
{
    // The other terminal already left; my neighbour on the axis is still off.
    const auto s = snap(Light::terminal, 9, {{-6, Scalar(-29, 2), Light::terminal}, {0, Scalar(-5, 2)}});
    EXPECT_TRUE(is_noop(phase1_compute(s), Light::terminal));
}

TEST(Phase1, TerminalPairKeepsExactGap)
{
    // Partner on the axis, nearest right robot 2 away: close to (n+3)/2 = 3 by moving 1 left.
    const auto s = snap(Light::terminal, 3, {{0, 2, Light::terminal}, {2, 1}});
    const Decision d = phase1_compute(s);
    ASSERT_EQ(d.plan.waypoints.size(), 1u);
    EXPECT_EQ(d.plan.waypoints[0], P(-1, 0));
}

TEST(Phase2, ReadyMovesToReadyOnLeft)
{
    const auto s = snap(Light::ready, 5, {{Scalar(-5, 2), 1, Light::ready}, {0, 2, Light::ready}, {3, 0}});
    const Decision d = phase2_compute(s);
    ASSERT_EQ(d.plan.waypoints.size(), 1u);
    EXPECT_EQ(d.plan.waypoints[0], P(Scalar(-5, 2), 0));
}

TEST(Phase2, ReadyTerminalAtExactGapRunsElectLeader)
{
    // n = 6: left batch of move-lit terminals at 1 + 1/6, L at y = 0; right batch offsets {3, -1}.
    const Scalar gap(7, 6);
    const auto s = snap(Light::ready, 6,
                        {{-gap, -1, Light::move}, {-gap, 1, Light::move}, {0, 2, Light::ready}, {3, 2}, {3, -2}});
    const Decision d = phase2_compute(s);
    EXPECT_EQ(d.branch, Branch::elect_leader);
}

TEST(Phase2, FailedPromotedWhenRightBatchReady)
{
    const auto s = snap(Light::failed, 5, {{0, 2, Light::failed}, {3, 0, Light::ready}, {3, 3, Light::ready}});
    EXPECT_EQ(phase2_compute(s).new_light, Light::move);
}

TEST(Phase2, FailedWaitsWhileRightBatchNotReady)
{
    const auto s = snap(Light::failed, 5, {{0, 2, Light::failed}, {3, 0, Light::ready}, {3, 3, Light::off}});
    EXPECT_TRUE(is_noop(phase2_compute(s), Light::failed));
}

TEST(Phase2, YieldsToSwitchOffInAdjacentBatch)
{
    const auto s = snap(Light::ready, 5, {{-3, 0, Light::switch_off}, {0, 2, Light::ready}});
    EXPECT_EQ(phase2_compute(s).new_light, Light::off);
}

TEST(Phase2, OffAdoptsReadyWhenLeftTerminalsFailed)
{
    const auto s = snap(Light::off, 5, {{-3, -1, Light::failed}, {-3, 2, Light::failed}, {0, 2}});
    EXPECT_EQ(phase2_compute(s).new_light, Light::ready);
}

TEST(Phase2, EquidistantRobotNominatesItselfOnSymmetry)
{
    const auto s = snap(Light::off, 5, {{-3, -2, Light::symmetry}, {-3, 2, Light::symmetry}, {0, 1}, {0, -1}});
    EXPECT_EQ(phase2_compute(s).new_light, Light::switch_off);
}

TEST(ElectLeader, AsymmetricLowerTerminalSwitchesOff)
{
    // L at y = 1 (midpoint with the partner); right batch at offsets {3, -1}.
    const auto lower = snap(Light::terminal, 4, {{0, 2, Light::terminal}, {2, 4}, {2, 0}});
    EXPECT_EQ(elect_leader(lower).new_light, Light::switch_off);
    const auto upper = snap(Light::terminal, 4, {{0, -2, Light::terminal}, {2, 2}, {2, -2}});
    EXPECT_TRUE(is_noop(elect_leader(upper), Light::terminal));
}

TEST(ElectLeader, CenterRobotGivesSymmetry)
{
    const auto s = snap(Light::terminal, 5, {{0, 2, Light::terminal}, {2, 2}, {2, 1}, {2, 0}});
    EXPECT_EQ(elect_leader(s).new_light, Light::symmetry);
}

TEST(ElectLeader, NoCenterRobotGivesFailed)
{
    const auto s = snap(Light::terminal, 4, {{0, 2, Light::terminal}, {2, 2}, {2, 0}});
    EXPECT_EQ(elect_leader(s).new_light, Light::failed);
}

TEST(ElectLeader, TooCloseRightBatchTraps)
{
    const auto s = snap(Light::terminal, 4, {{0, 2, Light::terminal}, {Scalar(3, 2), 3}, {Scalar(3, 2), -2}});
    EXPECT_THROW(elect_leader(s), std::runtime_error);
}

TEST(BecomeLeader, ReadyConfigurationSetsLeaderAtOnce)
{
    const auto s = snap(Light::switch_off, 3, {{2, -2}, {3, -5}});
    EXPECT_EQ(become_leader(s).new_light, Light::leader);
    EXPECT_TRUE(become_leader(s).plan.empty());
}

TEST(BecomeLeader, MiddleOfStackStepsOneLeft)
{
    const auto s = snap(Light::switch_off, 4, {{0, 1}, {0, -1}, {3, 0}});
    const Decision d = become_leader(s);
    ASSERT_EQ(d.plan.waypoints.size(), 1u);
    EXPECT_EQ(d.plan.waypoints[0], P(-1, 0));
}

TEST(BecomeLeader, VerticalMoveClearsEveryoneByTwo)
{
    const auto s = snap(Light::switch_off, 3, {{2, 1}, {2, -3}});
    const Decision d = become_leader(s);
    ASSERT_EQ(d.plan.waypoints.size(), 1u);
    EXPECT_EQ(d.plan.waypoints[0], P(0, -5));
}

TEST(BecomeLeader, BlockedBelowGoesUp)
{
    const auto s = snap(Light::switch_off, 3, {{0, -1}, {2, 3}});
    const Decision d = become_leader(s);
    ASSERT_EQ(d.plan.waypoints.size(), 1u);
    EXPECT_EQ(d.plan.waypoints[0], P(0, 5));
}

TEST(BecomeLeader, WaitsForNeighbouringBatchLights)
{
    const auto s = snap(Light::switch_off, 4, {{3, -2, Light::ready}, {3, -4}, {6, -3}});
    EXPECT_TRUE(is_noop(become_leader(s), Light::switch_off));
}

TEST(BecomeLeader, AlignsWithNearestLeftAxis)
{
    const auto s = snap(Light::switch_off, 4, {{-2, -3}, {-5, -3}, {2, -4}});
    const Decision d = become_leader(s);
    ASSERT_EQ(d.plan.waypoints.size(), 1u);
    EXPECT_EQ(d.plan.waypoints[0], P(-2, 0));
}

TEST(Stage2, NextRobotQueuesAfterParkedOnes)
{
    // Agreed frame: self at (6, 0), leader (0, -2), parked (1, -2) and (2, -2).
    const auto s = snap(Light::off, 5, {{-6, -2, Light::leader}, {-5, -2}, {-4, -2}, {-3, 4}});
    const Decision d = stage2_compute(s, Pattern{{P(0, 0), P(1, 0), P(2, 0), P(3, 0), P(4, 0)}});
    ASSERT_EQ(d.plan.waypoints.size(), 3u);
    EXPECT_EQ(d.plan.waypoints[0], P(0, -1));
    EXPECT_EQ(d.plan.waypoints[1], P(-3, -1));
    EXPECT_EQ(d.plan.waypoints[2], P(-3, -2));
}

TEST(Stage2, FirstParkedRobotHeadsForTopTarget)
{
    // Self at (1, -2), leader at (0, -2), others parked at (2, -2), (3, -2); t_0 = (0, 3).
    const Pattern p{{P(0, 0), P(0, 3), P(4, 0), P(5, 1)}};
    const auto s = snap(Light::off, 4, {{-1, 0, Light::leader}, {1, 0}, {2, 0}});
    const Decision d = stage2_compute(s, p);
    ASSERT_EQ(d.plan.waypoints.size(), 3u);
    EXPECT_EQ(d.plan.waypoints.back(), P(-1, 5));
}

TEST(Stage2, WaitsWhileOffRobotsRemainAbove)
{
    const Pattern p{{P(0, 0), P(0, 3), P(4, 0), P(5, 1)}};
    const auto s = snap(Light::off, 4, {{-1, 0, Light::leader}, {1, 0}, {2, 4}});
    EXPECT_TRUE(is_noop(stage2_compute(s, p), Light::off));
}

TEST(Stage2, LeaderOnLastTargetSetsDone)
{
    const auto s = snap(Light::leader, 3, {{0, 3, Light::done}, {4, 0, Light::done}});
    const Decision d = stage2_compute(s, tri());
    EXPECT_EQ(d.new_light, Light::done);
    EXPECT_TRUE(d.plan.empty());
}

TEST(Stage2, LeaderMovesOnlyWhenNoOffRemains)
{
    const auto waiting = snap(Light::leader, 3, {{0, 5, Light::done}, {1, 0}});
    EXPECT_TRUE(is_noop(stage2_compute(waiting, tri()), Light::leader));
    const auto go = snap(Light::leader, 3, {{0, 5, Light::done}, {4, 2, Light::done}});
    const Decision d = stage2_compute(go, tri());
    ASSERT_EQ(d.plan.waypoints.size(), 1u);
    EXPECT_EQ(d.plan.waypoints[0], P(0, 2));
}

TEST(EmbedPattern, TopToBottomRightToLeft)
{
    const auto t = embed_pattern(tri(), 3);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t[0], P(0, 3));
    EXPECT_EQ(t[1], P(4, 0));
    EXPECT_EQ(t[2], P(0, 0));
}

TEST(EmbedPattern, SingleRowIsRightToLeft)
{
    const auto t = embed_pattern(Pattern{{P(1, 0), P(5, 0), P(3, 0)}}, 3);
    EXPECT_EQ(t, (std::vector<Point>{P(5, 0), P(3, 0), P(1, 0)}));
}

TEST(EmbedPattern, SortedInputUnchanged)
{
    const std::vector<Point> sorted{P(2, 5), P(1, 5), P(3, 1)};
    EXPECT_EQ(embed_pattern(Pattern{sorted}, 3), sorted);
}

TEST(EmbedPattern, SizeMismatchThrows) { EXPECT_THROW(embed_pattern(tri(), 4), std::invalid_argument); }

TEST(Snapshot, ChiralityFlipsLocalY)
{
    Configuration c;
    c.robots = {{P(0, 0), Light::off, -1}, {P(2, 3), Light::terminal, 1}, {P(5, 0), Light::off, 1}};
    VisibilityCache cache;
    const auto s = take_snapshot(c, 0, cache);
    ASSERT_EQ(s.visible.size(), 2u);
    EXPECT_EQ(s.visible[0].pos, P(2, -3));
    EXPECT_EQ(s.visible[0].light, Light::terminal);
    EXPECT_EQ(to_global(P(1, -4), -1), P(1, 4));
    EXPECT_EQ(to_global(P(1, -4), 1), P(1, -4));
}

TEST(Snapshot, OccludedRobotIsNotVisible)
{
    Configuration c;
    c.robots = {{P(0, 0), Light::off, 1}, {P(2, 0), Light::off, 1}, {P(4, 0), Light::off, 1}};
    VisibilityCache cache;
    EXPECT_EQ(take_snapshot(c, 0, cache).visible.size(), 1u);
}

TEST(Final, FormedPatternIsFinalAndLeaderConfigurationIsNot)
{
    VisibilityCache cache;
    Configuration formed;
    formed.robots = {{P(0, 3), Light::done, 1}, {P(4, 0), Light::done, -1}, {P(0, 0), Light::done, 1}};
    EXPECT_TRUE(is_final_configuration(formed, tri(), cache));
    Configuration leader;
    leader.robots = {{P(0, 0), Light::leader, 1}, {P(2, 2), Light::off, 1}, {P(3, 5), Light::off, -1}};
    EXPECT_FALSE(is_final_configuration(leader, tri(), cache));
}

TEST(Properties, ComputeIsDeterministic)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto disks = testkit::random_disks(rng, 6, 5, 2);
        Configuration c;
        for (const Disk& d : disks) c.robots.push_back({d.center, Light::off, 1});
        VisibilityCache cache;
        const Pattern p{{P(0, 0), P(1, 0), P(2, 0), P(0, 1), P(1, 1), P(2, 2)}};
        for (std::size_t i = 0; i < c.n(); ++i) {
            const auto s = take_snapshot(c, i, cache);
            const Decision a = compute(s, p), b = compute(s, p);
            EXPECT_EQ(a.new_light, b.new_light);
            EXPECT_EQ(a.plan.waypoints, b.plan.waypoints);
            EXPECT_EQ(a.branch, b.branch);
        }
    }
}

TEST(Properties, ChiralityChangesOnlyTheFreeVerticalChoice)
{
    // Stage-1 snapshots: flipping a robot's chirality yields the same global
    // decision, except that become_leader may go the mirrored vertical way.
    std::mt19937_64 rng(23);
    const std::vector<Light> menu{Light::off, Light::off, Light::terminal, Light::interior, Light::ready,
                                  Light::failed, Light::move, Light::symmetry, Light::switch_off};
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto disks = testkit::random_disks(rng, 5, 6, 2);
        Configuration c;
        for (const Disk& d : disks) c.robots.push_back({d.center, menu[rng() % menu.size()], 1});
        const Pattern p{{P(0, 0), P(1, 0), P(2, 0), P(0, 1), P(1, 1)}};
        VisibilityCache cache;
        for (std::size_t i = 0; i < c.n(); ++i) {
            Configuration flipped = c;
            flipped.robots[i].chirality = -1;
            Decision a, b;
            try {
                a = compute(take_snapshot(c, i, cache), p);
                b = compute(take_snapshot(flipped, i, cache), p);
            } catch (const std::runtime_error&) {
                continue;
            }
            ++compared;
            EXPECT_EQ(a.new_light, b.new_light);
            ASSERT_EQ(a.plan.waypoints.size(), b.plan.waypoints.size());
            for (std::size_t k = 0; k < a.plan.waypoints.size(); ++k) {
                const Point ga = to_global(a.plan.waypoints[k], 1);
                const Point gb = to_global(b.plan.waypoints[k], -1);
                if (a.branch == Branch::become_leader && ga.x == 0 && gb.x == 0) continue;  // up or down
                EXPECT_EQ(ga, gb) << to_string(a.branch) << " light " << to_string(c.robots[i].light) << " a=("
                                  << to_string(ga.x) << "," << to_string(ga.y) << ") b=(" << to_string(gb.x) << ","
                                  << to_string(gb.y) << ")";
            }
        }
    }
    EXPECT_GT(compared, 500);
}
