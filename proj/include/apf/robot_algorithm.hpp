#pragma once

#include "apf/config_analysis.hpp"
#include "apf/geometry.hpp"
#include "apf/visibility.hpp"

#include <string_view>
#include <vector>

namespace apf {

struct SeenRobot {
    Point pos;  // relative to self, in the observer's local frame
    Light light;
};

/// What one robot perceives during Look. Self sits at the local origin; the
/// x axis is shared and y is multiplied by the robot's private chirality.
struct LocalSnapshot {
    Light self_light = Light::off;
    std::vector<SeenRobot> visible;
    std::size_t n = 0;
    int chirality = 1;
};

struct Pattern {
    std::vector<Point> targets;
};

/// Waypoints in the local frame of the robot that computed them.
struct MotionPlan {
    std::vector<Point> waypoints;
    bool empty() const { return waypoints.empty(); }
};

/// Which part of the algorithm produced a decision.
enum class Branch { stage2, phase1, phase2, elect_leader, become_leader };

std::string_view to_string(Branch b);

struct Decision {
    Light new_light = Light::off;
    MotionPlan plan;
    Branch branch = Branch::phase1;
};

/// True when the decision changes neither the light nor the position.
bool is_noop(const Decision& d, Light current);

Decision compute(const LocalSnapshot& s, const Pattern& pattern);
Decision phase1_compute(const LocalSnapshot& s);
Decision phase2_compute(const LocalSnapshot& s);
Decision elect_leader(const LocalSnapshot& s);
Decision become_leader(const LocalSnapshot& s);
Decision stage2_compute(const LocalSnapshot& s, const Pattern& pattern);

/// Pattern points in the agreed frame, ordered top to bottom and right to
/// left within a row.
std::vector<Point> embed_pattern(const Pattern& pattern, std::size_t n);

/// Snapshot of robot i in `positions` (current centers, possibly mid-move).
LocalSnapshot take_snapshot(std::span<const Point> positions, std::span<const Light> lights, std::size_t i,
                            int chirality, VisibilityCache& cache);
LocalSnapshot take_snapshot(const Configuration& c, std::size_t i, VisibilityCache& cache);

/// Local-frame vector to global: y is flipped back by the chirality.
Point to_global(const Point& local, int chirality);

/// Every robot, looking at the configuration now, decides a no-op.
/// Meaningful only when no robot is moving or holds an unexecuted decision.
bool is_final_configuration(const Configuration& c, const Pattern& pattern, VisibilityCache& cache);

}  // namespace apf
