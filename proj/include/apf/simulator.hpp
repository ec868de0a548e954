#pragma once

#include "apf/config_analysis.hpp"
#include "apf/robot_algorithm.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace apf {

enum class Mode { async, ssync };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

/// Monitor names: M1 collision, M2 single leader / switch_off, M3 spacing at
/// ElectLeader, M4 light transitions, M5 Stage-2 serialization, M6 leader
/// configuration when the leader light appears, and "phase" (no Phase-1 action
/// once a leader exists, apart from the brief terminal relapse).
inline const std::vector<std::string>& default_monitors()
{
    static const std::vector<std::string> m{"M1", "M2", "M3", "M4", "M5", "M6"};
    return m;
}

struct SimParams {
    Mode mode = Mode::async;
    Scalar delta = Scalar(1, 4);  // never passed to the algorithm
    std::uint64_t seed = 1;
    std::uint64_t max_events = 100000;
    std::vector<std::string> monitors = default_monitors();
    std::uint64_t fairness_window = 0;  // 0 means 8n events
    bool ssync_all = false;             // SSYNC: activate every robot each round
};

enum class EventKind { Activate, LookDone, ComputeDone, LightSet, MoveProgress, MoveEnd };

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct TraceEvent {
    Scalar time;
    std::size_t robot = 0;
    EventKind kind = EventKind::Activate;
    Point position;                   // global center at the event
    Light light = Light::off;         // current light; the new light for LightSet
    Light previous_light = Light::off;  // LightSet and ComputeDone
    std::string branch;               // LookDone and ComputeDone
    std::vector<Point> waypoints;     // ComputeDone: requested path, global
    std::vector<std::size_t> seen;    // LookDone: visible robot indices
};

struct Trace {
    SimParams params;
    Configuration initial;
    Pattern pattern;
    std::vector<TraceEvent> events;
};

struct Violation {
    std::string monitor;
    std::size_t event_index = 0;
    Scalar time;
    std::string message;
};

enum class RunStatus { final, budget, monitor };

std::string_view to_string(RunStatus s);

struct RunResult {
    RunStatus status = RunStatus::budget;
    Trace trace;
    Configuration final_config;
    std::vector<Violation> violations;
    std::uint64_t moves = 0;
    std::uint64_t stage1_events = 0;
    std::uint64_t stage2_events = 0;
    std::uint64_t looks_seeing_motion = 0;  // Looks that saw some robot mid-move
    std::optional<std::size_t> first_leader_event;
    bool first_leader_configuration_ok = false;
};

/// Thrown by `run`; carries the partial trace.
class SimulationError : public std::runtime_error {
public:
    SimulationError(std::string what, RunResult result)
        : std::runtime_error(std::move(what)), result_(std::move(result))
    {
    }
    const RunResult& result() const { return result_; }

private:
    RunResult result_;
};

/// Throws std::invalid_argument when the configuration is malformed, not all
/// off, or has the unsolvable symmetry.
void check_run_preconditions(const Configuration& config, const Pattern& pattern);

/// Runs to a final configuration, the event budget, or the first monitor violation.
RunResult simulate(const Configuration& config, const Pattern& pattern, const SimParams& params);

/// Like `simulate`, but budget exhaustion and monitor violations throw SimulationError.
Trace run(const Configuration& config, const Pattern& pattern, const SimParams& params);

/// Stop point after traversing `requested` arclength along `path` (path[0] is
/// the start), with the traversed length raised to at least min(delta, total).
/// Returns the executed path: the start, every waypoint passed, and the stop point.
std::vector<Point> truncate_move(const std::vector<Point>& path, const Scalar& requested, const Scalar& delta);

/// Violations triggered by `event` given the configuration just after it.
/// `prev_positions` are the centers at the previous event instant (for M1).
struct MonitorState {
    std::vector<std::string> enabled;
    std::vector<Point> prev_positions;
    bool stage2 = false;
};

std::vector<Violation> monitor_step(MonitorState& state, const Configuration& now, const TraceEvent& event,
                                    std::size_t event_index, const std::vector<bool>& moving);

/// Whether `from -> to` is an allowed light change.
bool allowed_transition(Light from, Light to);

std::uint64_t count_moves(const Trace& t);

/// Final configuration obtained by applying the events of `t` to its header.
Configuration replay(const Trace& t);

std::string serialize_trace(const Trace& t);
Trace parse_trace(const std::string& text);

}  // namespace apf
