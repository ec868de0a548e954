#include "apf/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace apf {

namespace {

using nlohmann::json;

std::string field(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

Scalar scalar_at(const json& j, const std::string& path)
{
    if (j.is_number_integer()) return Scalar(std::to_string(j.get<long long>()));
    if (!j.is_string()) throw ValidationError(path, "expected a fraction string");
    try {
        return parse_scalar(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ValidationError(path, e.what());
    }
}

Point point_at(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2) throw ValidationError(path, "expected [x, y]");
    return {scalar_at(j[0], path + "[0]"), scalar_at(j[1], path + "[1]")};
}

std::vector<Point> points_at(const json& doc, const std::string& key)
{
    if (!doc.contains(key)) throw ValidationError(key, "missing");
    const json& arr = doc.at(key);
    if (!arr.is_array()) throw ValidationError(key, "expected a list");
    std::vector<Point> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(point_at(arr[i], field(key, i)));
    return out;
}

json pair_json(const Point& p) { return json::array({to_string(p.x), to_string(p.y)}); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t salt)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(salt)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::vector<Point> grid_pattern(std::mt19937_64& rng, std::size_t n)
{
    const long m = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n)))) + 1;
    std::set<Point> used;
    std::vector<Point> pts;
    while (pts.size() < n) {
        const Point p{frac(static_cast<long>(rng() % (2 * m + 1)), 2), frac(static_cast<long>(rng() % (2 * m + 1)), 2)};
        if (used.insert(p).second) pts.push_back(p);
    }
    const long k = pattern_scale_factor(pts);
    for (Point& p : pts) p = Scalar(k) * p;
    return pts;
}

}  // namespace

long pattern_scale_factor(const std::vector<Point>& pattern)
{
    std::optional<Scalar> best;
    for (std::size_t a = 0; a < pattern.size(); ++a) {
        for (std::size_t b = a + 1; b < pattern.size(); ++b) {
            const Scalar d = squared_distance(pattern[a], pattern[b]);
            if (!best || d < *best) best = d;
        }
    }
    if (!best || *best >= 1 || sgn(*best) == 0) return 1;
    long k = 1;
    while (Scalar(k * k) * *best < 1) ++k;
    return k;
}

void validate_instance(const Instance& inst)
{
    const std::size_t n = inst.config.n();
    if (n < 3) throw ValidationError("n", "n >= 3 required");
    if (inst.pattern.targets.size() != n) throw ValidationError("pattern", "expected n points");
    for (std::size_t i = 0; i < n; ++i) {
        const Robot& r = inst.config.robots[i];
        if (r.chirality != 1 && r.chirality != -1) throw ValidationError(field("chirality", i), "must be 1 or -1");
        for (std::size_t j = 0; j < i; ++j) {
            if (squared_distance(inst.config.robots[j].center, r.center) < 1) {
                throw ValidationError(field("robots", i), "closer than 1 to robots[" + std::to_string(j) + "]");
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = inst.pattern.targets[i];
        if (sgn(p.x) < 0 || sgn(p.y) < 0) throw ValidationError(field("pattern", i), "coordinates must be nonnegative");
        for (std::size_t j = 0; j < i; ++j) {
            if (inst.pattern.targets[j] == p) throw ValidationError(field("pattern", i), "duplicate point");
        }
    }
}

Instance parse_instance(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError("", std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("", "expected an object");
    Instance inst;
    const auto robots = points_at(doc, "robots");
    auto pattern = points_at(doc, "pattern");
    if (doc.contains("n")) {
        if (!doc.at("n").is_number_integer()) throw ValidationError("n", "expected an integer");
        const auto n = doc.at("n").get<long long>();
        if (n < 3) throw ValidationError("n", "n >= 3 required");
        if (static_cast<std::size_t>(n) != robots.size()) throw ValidationError("robots", "expected n entries");
        if (static_cast<std::size_t>(n) != pattern.size()) throw ValidationError("pattern", "expected n entries");
    }
    for (std::size_t i = 0; i < robots.size(); ++i) inst.config.robots.push_back({robots[i], Light::off, 1});
    if (doc.contains("chirality")) {
        const json& c = doc.at("chirality");
        if (!c.is_array() || c.size() != robots.size()) throw ValidationError("chirality", "expected n entries");
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!c[i].is_number_integer()) throw ValidationError(field("chirality", i), "expected 1 or -1");
            inst.config.robots[i].chirality = c[i].get<int>();
        }
    }
    if (doc.contains("lights")) {
        const json& l = doc.at("lights");
        if (!l.is_array() || l.size() != robots.size()) throw ValidationError("lights", "expected n entries");
        for (std::size_t i = 0; i < l.size(); ++i) {
            const auto light = l[i].is_string() ? parse_light(l[i].get<std::string>()) : std::nullopt;
            if (!light) throw ValidationError(field("lights", i), "unknown light");
            inst.config.robots[i].light = *light;
        }
    }
    const long k = pattern_scale_factor(pattern);
    for (Point& p : pattern) p = Scalar(k) * p;
    inst.pattern.targets = pattern;
    validate_instance(inst);
    return inst;
}

std::string serialize_instance(const Instance& inst)
{
    json robots = json::array(), pattern = json::array(), chir = json::array(), lights = json::array();
    bool any_light = false;
    for (const Robot& r : inst.config.robots) {
        robots.push_back(pair_json(r.center));
        chir.push_back(r.chirality);
        lights.push_back(std::string(to_string(r.light)));
        any_light = any_light || r.light != Light::off;
    }
    for (const Point& p : inst.pattern.targets) pattern.push_back(pair_json(p));
    // One key per line, values compact.
    std::string out = "{\n \"n\": " + std::to_string(inst.config.n()) + ",\n \"robots\": " + robots.dump() +
                      ",\n \"pattern\": " + pattern.dump() + ",\n \"chirality\": " + chir.dump();
    if (any_light) out += ",\n \"lights\": " + lights.dump();
    return out + "\n}\n";
}

Instance generate_instance(std::size_t n, std::uint64_t seed)
{
    if (n < 3) throw ValidationError("n", "n >= 3 required");
    std::mt19937_64 rng(mix_seed(seed, n, 1));
    const long width = std::max<long>(2, static_cast<long>(n + 1) / 2);
    const long height = 2 * static_cast<long>(n + 2);
    Instance inst;
    for (;;) {
        inst.config.robots.clear();
        while (inst.config.robots.size() < n) {
            const Point p{Scalar(static_cast<long>(rng() % width)), frac(static_cast<long>(rng() % (height + 1)), 2)};
            bool free = true;
            for (const Robot& r : inst.config.robots) free = free && squared_distance(r.center, p) >= 1;
            if (free) inst.config.robots.push_back({p, Light::off, (rng() & 1) ? 1 : -1});
        }
        if (!unsolvable_initial(inst.config)) break;
    }
    inst.pattern.targets = grid_pattern(rng, n);
    return inst;
}

Instance generate_collinear_instance(std::size_t n, std::uint64_t seed)
{
    if (n < 3) throw ValidationError("n", "n >= 3 required");
    std::mt19937_64 rng(mix_seed(seed, n, 2));
    const std::vector<Scalar> gaps{Scalar(1), frac(3, 2), Scalar(2), frac(5, 2)};
    Instance inst;
    for (;;) {
        inst.config.robots.clear();
        Scalar y = 0;
        for (std::size_t i = 0; i < n; ++i) {
            inst.config.robots.push_back({{Scalar(0), y}, Light::off, (rng() & 1) ? 1 : -1});
            y += gaps[rng() % gaps.size()];
        }
        if (!unsolvable_initial(inst.config)) break;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const long x = static_cast<long>(i);
        inst.pattern.targets.push_back({Scalar(x), Scalar(x * x)});
    }
    return inst;
}

std::string_view to_string(Outcome o)
{
    switch (o) {
    case Outcome::formed: return "Formed";
    case Outcome::not_formed: return "NotFormed";
    case Outcome::rejected: return "Rejected";
    case Outcome::budget_exhausted: return "BudgetExhausted";
    case Outcome::monitor_violation: return "MonitorViolation";
    }
    return "?";
}

RunReport run_instance(const Instance& inst, const SimParams& params, Trace* trace)
{
    RunReport rep;
    try {
        check_run_preconditions(inst.config, inst.pattern);
    } catch (const std::invalid_argument& e) {
        rep.outcome = Outcome::rejected;
        rep.message = e.what();
        rep.witness_axis = unsolvable_axis(inst.config.centers());
        return rep;
    }
    RunResult r = simulate(inst.config, inst.pattern, params);
    rep.move_count = r.moves;
    rep.event_count = r.trace.events.size();
    rep.stage1_events = r.stage1_events;
    rep.stage2_events = r.stage2_events;
    rep.first_leader_event = r.first_leader_event;
    rep.first_leader_configuration_ok = r.first_leader_configuration_ok;
    rep.looks_seeing_motion = r.looks_seeing_motion;
    switch (r.status) {
    case RunStatus::final: {
        rep.witness = find_similarity(r.final_config.centers(), inst.pattern.targets);
        rep.similar = rep.witness.has_value();
        rep.outcome = rep.similar ? Outcome::formed : Outcome::not_formed;
        if (!rep.similar) rep.message = "final configuration is not similar to the pattern";
        break;
    }
    case RunStatus::budget:
        rep.outcome = Outcome::budget_exhausted;
        rep.message = "non-termination within budget";
        break;
    case RunStatus::monitor:
        rep.outcome = Outcome::monitor_violation;
        rep.monitor = r.violations.front().monitor;
        rep.message = "monitor " + rep.monitor + " violated at event " + std::to_string(r.violations.front().event_index) +
                      ": " + r.violations.front().message;
        break;
    }
    if (trace != nullptr) *trace = std::move(r.trace);
    return rep;
}

std::string format_witness(const SimilarityWitness& w)
{
    std::ostringstream out;
    out << "rotation " << to_string(w.rot_re) << " + " << to_string(w.rot_im) << "i, reflected "
        << (w.reflected ? "yes" : "no") << ", offset (" << to_string(w.offset.x) << ", " << to_string(w.offset.y) << ")";
    return out.str();
}

std::string serialize_report(const RunReport& r)
{
    json doc{
        {"outcome", std::string(to_string(r.outcome))},
        {"move_count", r.move_count},
        {"event_count", r.event_count},
        {"similar", r.similar},
        {"stage1_events", r.stage1_events},
        {"stage2_events", r.stage2_events},
        {"looks_seeing_motion", r.looks_seeing_motion},
        {"first_leader_configuration_ok", r.first_leader_configuration_ok},
    };
    if (!r.message.empty()) doc["message"] = r.message;
    if (!r.monitor.empty()) doc["monitor"] = r.monitor;
    if (r.witness_axis) doc["witness_axis_y"] = to_string(*r.witness_axis);
    if (r.first_leader_event) doc["first_leader_event"] = *r.first_leader_event;
    if (r.witness) {
        doc["witness"] = {{"rot_re", to_string(r.witness->rot_re)},
                          {"rot_im", to_string(r.witness->rot_im)},
                          {"reflected", r.witness->reflected},
                          {"offset", pair_json(r.witness->offset)}};
    }
    return doc.dump(1) + "\n";
}

int exit_code(const RunReport& r)
{
    switch (r.outcome) {
    case Outcome::formed: return 0;
    case Outcome::rejected: return 2;
    case Outcome::budget_exhausted: return 3;
    case Outcome::monitor_violation:
    case Outcome::not_formed: return 4;
    }
    return 4;
}

StatsResult move_stats(const StatsOptions& opt)
{
    struct Job {
        std::size_t n;
        std::uint64_t seed;
        std::uint64_t moves = 0;
        bool ok = false;
    };
    std::vector<Job> jobs;
    for (std::size_t n = opt.n_min; n <= opt.n_max; ++n) {
        for (std::size_t s = 0; s < opt.seeds; ++s) jobs.push_back({n, opt.first_seed + s});
    }
    // Largest instances first keeps the workers busy until the end.
    std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) { return a.n > b.n; });
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            Job& j = jobs[k];
            const Instance inst =
                opt.collinear ? generate_collinear_instance(j.n, j.seed) : generate_instance(j.n, j.seed);
            SimParams p;
            p.mode = Mode::ssync;
            p.seed = j.seed;
            p.max_events = opt.max_events;
            const RunReport r = run_instance(inst, p);
            j.ok = r.outcome == Outcome::formed;
            j.moves = r.move_count;
        }
    };
    unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    StatsResult out;
    for (std::size_t n = opt.n_min; n <= opt.n_max; ++n) {
        StatsRow row;
        row.n = n;
        double sum = 0;
        for (const Job& j : jobs) {
            if (j.n != n) continue;
            ++row.runs;
            if (!j.ok) ++row.failures;
            sum += static_cast<double>(j.moves);
            row.max_moves = std::max(row.max_moves, j.moves);
            row.min_moves = row.runs == 1 ? j.moves : std::min(row.min_moves, j.moves);
        }
        row.mean_moves = row.runs ? sum / static_cast<double>(row.runs) : 0;
        out.rows.push_back(row);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const StatsRow& r : out.rows) {
        const double x = static_cast<double>(r.n), y = static_cast<double>(r.max_moves);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        out.c = std::max(out.c, y / x);
    }
    const double m = static_cast<double>(out.rows.size());
    const double den = m * sxx - sx * sx;
    if (m >= 2 && den != 0) {
        out.slope = (m * sxy - sx * sy) / den;
        out.intercept = (sy - out.slope * sx) / m;
    }
    return out;
}

std::string format_stats(const StatsResult& s)
{
    std::ostringstream out;
    out << "n\truns\tmean_moves\tmin_moves\tmax_moves\tfailures\n";
    out.setf(std::ios::fixed);
    out.precision(2);
    for (const StatsRow& r : s.rows) {
        out << r.n << '\t' << r.runs << '\t' << r.mean_moves << '\t' << r.min_moves << '\t' << r.max_moves << '\t'
            << r.failures << '\n';
    }
    out.precision(4);
    out << "fit max_moves ~ " << s.slope << " * n + " << s.intercept << "\n";
    out << "C = " << s.c << " (max_moves <= C * n for every n)\n";
    return out.str();
}

std::vector<Point> parse_centers(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError("", std::string("not valid JSON: ") + e.what());
    }
    if (doc.is_object()) return points_at(doc, "centers");
    if (!doc.is_array()) throw ValidationError("", "expected a list of [x, y] pairs");
    std::vector<Point> out;
    for (std::size_t i = 0; i < doc.size(); ++i) out.push_back(point_at(doc[i], field("centers", i)));
    return out;
}

VerifyResult verify_centers(const Instance& inst, const std::vector<Point>& centers)
{
    if (centers.size() != inst.pattern.targets.size()) throw ValidationError("centers", "count mismatch");
    VerifyResult v;
    try {
        v.witness = find_similarity(centers, inst.pattern.targets);
    } catch (const std::invalid_argument& e) {
        throw ValidationError("centers", e.what());
    }
    v.similar = v.witness.has_value();
    return v;
}

}  // namespace apf
