#pragma once

#include "apf/simulator.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace apf {

/// Validation failure; the message starts with the offending field path.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(const std::string& path, const std::string& what)
        : std::invalid_argument(path.empty() ? what : path + ": " + what), path_(path)
    {
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct Instance {
    Configuration config;
    Pattern pattern;
};

/// Parses and validates an instance document:
/// {"n": 3, "robots": [["0","1/2"], ...], "pattern": [["0","0"], ...],
///  "chirality": [1, -1, ...], "lights": ["off", ...]}
/// The last two fields are optional. Patterns closer than 1 are scaled up.
Instance parse_instance(const std::string& text);
std::string serialize_instance(const Instance& inst);

/// Throws ValidationError. Does not check solvability.
void validate_instance(const Instance& inst);

/// Smallest positive integer k with every pairwise target distance times k at least 1.
long pattern_scale_factor(const std::vector<Point>& pattern);

/// Random solvable instance: integer abscissae, ordinates on a 1/2 grid,
/// random chirality, pattern on a 1/2 grid scaled to unit separation.
Instance generate_instance(std::size_t n, std::uint64_t seed);

/// All robots on one vertical line with irregular gaps; the pattern has no
/// three collinear points.
Instance generate_collinear_instance(std::size_t n, std::uint64_t seed);

enum class Outcome { formed, not_formed, rejected, budget_exhausted, monitor_violation };

std::string_view to_string(Outcome o);

struct RunReport {
    Outcome outcome = Outcome::rejected;
    std::string message;
    std::optional<Scalar> witness_axis;  // rejected: the symmetry axis y = c
    std::string monitor;                 // monitor_violation
    std::uint64_t move_count = 0;
    std::uint64_t event_count = 0;
    bool similar = false;
    std::optional<SimilarityWitness> witness;
    std::uint64_t stage1_events = 0;
    std::uint64_t stage2_events = 0;
    std::optional<std::size_t> first_leader_event;
    bool first_leader_configuration_ok = false;
    std::uint64_t looks_seeing_motion = 0;
};

/// Runs the simulator and classifies the result. `trace` receives the
/// (possibly partial) trace when given.
RunReport run_instance(const Instance& inst, const SimParams& params, Trace* trace = nullptr);

std::string serialize_report(const RunReport& r);

/// Process exit code for a report: 0 formed, 2 rejected, 3 budget, 4 monitor
/// violation or a final configuration that is not the pattern.
int exit_code(const RunReport& r);

struct StatsRow {
    std::size_t n = 0;
    std::size_t runs = 0;
    double mean_moves = 0;
    std::uint64_t max_moves = 0;
    std::uint64_t min_moves = 0;
    std::size_t failures = 0;
};

struct StatsResult {
    std::vector<StatsRow> rows;
    double slope = 0;      // least-squares slope of max moves against n
    double intercept = 0;
    double c = 0;          // smallest C with max_moves <= C * n for every row
};

struct StatsOptions {
    std::size_t n_min = 3;
    std::size_t n_max = 30;
    std::size_t seeds = 20;
    std::uint64_t first_seed = 1;
    bool collinear = false;
    std::uint64_t max_events = 1000000;
    unsigned workers = 0;  // 0: hardware concurrency
};

/// SSYNC move counts per n over generated instances.
StatsResult move_stats(const StatsOptions& opt);
std::string format_stats(const StatsResult& s);

/// One SVG document per frame: after every `every`-th event, plus the last
/// event; a trace without events yields one frame of the initial state.
std::vector<std::string> render_frames(const Trace& t, std::size_t every);

/// Reads centers as {"centers": [["x","y"], ...]} or a bare list of pairs.
std::vector<Point> parse_centers(const std::string& text);

struct VerifyResult {
    bool similar = false;
    std::optional<SimilarityWitness> witness;
};

/// Throws ValidationError("count mismatch") when the sizes differ.
VerifyResult verify_centers(const Instance& inst, const std::vector<Point>& centers);
std::string format_witness(const SimilarityWitness& w);

}  // namespace apf
