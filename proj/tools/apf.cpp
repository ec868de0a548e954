#include "apf/harness.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace apf;

constexpr int kExitValidation = 2;
constexpr int kExitIo = 5;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw IoError("cannot write " + path);
}

std::uint64_t default_seed()
{
    if (const char* env = std::getenv("APF_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ValidationError("APF_SEED", "not an unsigned integer");
        }
    }
    return 1;
}

struct RunArgs {
    std::string instance;
    std::string mode = "async";
    std::optional<std::uint64_t> seed;
    std::string delta = "1/4";
    std::uint64_t budget = 100000;
    std::string trace_out;
    std::string report_out;
    std::vector<std::string> monitors;
};

int cmd_run(const RunArgs& a)
{
    const Instance inst = parse_instance(read_file(a.instance));
    SimParams p;
    const auto mode = parse_mode(a.mode);
    if (!mode) throw ValidationError("--mode", "expected async or ssync");
    p.mode = *mode;
    p.seed = a.seed ? *a.seed : default_seed();
    p.delta = parse_scalar(a.delta);
    if (sgn(p.delta) <= 0) throw ValidationError("--delta", "must be positive");
    if (a.budget == 0) throw ValidationError("--budget", "must be positive");
    p.max_events = a.budget;
    if (!a.monitors.empty()) p.monitors = a.monitors;

    Trace trace;
    const RunReport r = run_instance(inst, p, &trace);
    if (!a.trace_out.empty() && r.outcome != Outcome::rejected) write_file(a.trace_out, serialize_trace(trace));
    const std::string report = serialize_report(r);
    if (a.report_out.empty()) {
        std::cout << report;
    } else {
        write_file(a.report_out, report);
        std::cout << to_string(r.outcome) << (r.message.empty() ? "" : ": " + r.message) << "\n";
    }
    return exit_code(r);
}

int cmd_gen(std::size_t n, std::optional<std::uint64_t> seed, const std::string& out, bool collinear)
{
    const std::uint64_t s = seed ? *seed : default_seed();
    const Instance inst = collinear ? generate_collinear_instance(n, s) : generate_instance(n, s);
    const std::string text = serialize_instance(inst);
    if (out.empty()) {
        std::cout << text;
    } else {
        write_file(out, text);
    }
    return 0;
}

int cmd_stats(StatsOptions opt, const std::string& range, const std::string& mode, const std::string& out)
{
    if (mode != "ssync" && mode != "SSYNC") throw ValidationError("--mode", "move statistics require ssync");
    if (!range.empty()) {
        const auto dash = range.find('-');
        try {
            if (dash == std::string::npos) {
                opt.n_min = opt.n_max = std::stoul(range);
            } else {
                opt.n_min = std::stoul(range.substr(0, dash));
                opt.n_max = std::stoul(range.substr(dash + 1));
            }
        } catch (const std::exception&) {
            throw ValidationError("--n-range", "expected LO-HI");
        }
    }
    if (opt.n_min < 3 || opt.n_max < opt.n_min) throw ValidationError("--n-range", "need 3 <= LO <= HI");
    if (opt.seeds == 0) throw ValidationError("--seeds", "must be positive");
    const StatsResult s = move_stats(opt);
    const std::string text = format_stats(s);
    if (out.empty()) {
        std::cout << text;
    } else {
        write_file(out, text);
    }
    for (const StatsRow& r : s.rows) {
        if (r.failures) return 4;
    }
    return 0;
}

int cmd_render(const std::string& trace_path, const std::string& out_dir, std::size_t every)
{
    if (every == 0) throw ValidationError("--every", "must be positive");
    Trace t;
    try {
        t = parse_trace(read_file(trace_path));
    } catch (const std::invalid_argument& e) {
        throw ValidationError("trace", e.what());
    }
    const auto frames = render_frames(t, every);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir);
    for (std::size_t k = 0; k < frames.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%05zu.svg", k);
        write_file((std::filesystem::path(out_dir) / name).string(), frames[k]);
    }
    std::cout << frames.size() << " frames written to " << out_dir << "\n";
    return 0;
}

int cmd_verify(const std::string& instance, const std::string& centers_path)
{
    const Instance inst = parse_instance(read_file(instance));
    const auto centers = parse_centers(read_file(centers_path));
    const VerifyResult v = verify_centers(inst, centers);
    std::cout << (v.similar ? "similar: true" : "similar: false") << "\n";
    if (v.witness) std::cout << "witness: " << format_witness(*v.witness) << "\n";
    return v.similar ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pattern formation by opaque fat luminous robots: simulator and tools"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Simulate an instance and report the outcome");
    run_cmd->add_option("instance", run.instance, "Instance file")->required();
    run_cmd->add_option("--mode", run.mode, "async or ssync");
    run_cmd->add_option("--seed", run.seed, "Adversary seed (default: APF_SEED or 1)");
    run_cmd->add_option("--delta", run.delta, "Minimum traversal of a non-rigid move, as p/q");
    run_cmd->add_option("--budget", run.budget, "Maximum number of events");
    run_cmd->add_option("--trace", run.trace_out, "Write the event trace here");
    run_cmd->add_option("--report", run.report_out, "Write the run report here");
    run_cmd->add_option("--monitors", run.monitors, "Monitors to enable (default M1..M6)");

    std::size_t gen_n = 0;
    std::optional<std::uint64_t> gen_seed;
    std::string gen_out;
    bool gen_collinear = false;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a random solvable instance");
    gen_cmd->add_option("--n", gen_n, "Number of robots")->required();
    gen_cmd->add_option("--seed", gen_seed, "Generator seed (default: APF_SEED or 1)");
    gen_cmd->add_option("--out", gen_out, "Output file (default: stdout)");
    gen_cmd->add_flag("--collinear", gen_collinear, "Start all robots on one vertical line");

    StatsOptions stats;
    std::string stats_range, stats_mode = "ssync", stats_out;
    auto* stats_cmd = app.add_subcommand("stats", "Move counts per n under SSYNC");
    stats_cmd->add_option("--n-range", stats_range, "LO-HI, e.g. 3-30");
    stats_cmd->add_option("--seeds", stats.seeds, "Seeds per n");
    stats_cmd->add_option("--first-seed", stats.first_seed, "First seed");
    stats_cmd->add_option("--mode", stats_mode, "Must be ssync");
    stats_cmd->add_option("--workers", stats.workers, "Parallel runs (default: all cores)");
    stats_cmd->add_option("--budget", stats.max_events, "Maximum events per run");
    stats_cmd->add_flag("--collinear", stats.collinear, "Use collinear starts with a parabola pattern");
    stats_cmd->add_option("--out", stats_out, "Output file (default: stdout)");

    std::string render_trace, render_out = "frames";
    std::size_t render_every = 1;
    auto* render_cmd = app.add_subcommand("render", "Render a trace as SVG frames");
    render_cmd->add_option("trace", render_trace, "Trace file")->required();
    render_cmd->add_option("--out", render_out, "Output directory");
    render_cmd->add_option("--every", render_every, "One frame per k events");

    std::string verify_instance, verify_centers_path;
    auto* verify_cmd = app.add_subcommand("verify", "Check final centers against an instance's pattern");
    verify_cmd->add_option("instance", verify_instance, "Instance file")->required();
    verify_cmd->add_option("centers", verify_centers_path, "Centers file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*gen_cmd) return cmd_gen(gen_n, gen_seed, gen_out, gen_collinear);
        if (*stats_cmd) return cmd_stats(stats, stats_range, stats_mode, stats_out);
        if (*render_cmd) return cmd_render(render_trace, render_out, render_every);
        if (*verify_cmd) return cmd_verify(verify_instance, verify_centers_path);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
