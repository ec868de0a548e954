#include "apf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

namespace apf {

std::string_view to_string(Mode m) { return m == Mode::async ? "async" : "ssync"; }

std::optional<Mode> parse_mode(std::string_view s)
{
    if (s == "async" || s == "ASYNC") return Mode::async;
    if (s == "ssync" || s == "SSYNC") return Mode::ssync;
    return std::nullopt;
}

namespace {
constexpr std::array<std::string_view, 6> kKindNames = {"Activate",  "LookDone",     "ComputeDone",
                                                        "LightSet", "MoveProgress", "MoveEnd"};
}

std::string_view to_string(EventKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<EventKind> parse_event_kind(std::string_view s)
{
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == s) return static_cast<EventKind>(i);
    }
    return std::nullopt;
}

std::string_view to_string(RunStatus s)
{
    switch (s) {
    case RunStatus::final: return "final";
    case RunStatus::budget: return "budget";
    case RunStatus::monitor: return "monitor";
    }
    return "?";
}

void check_run_preconditions(const Configuration& config, const Pattern& pattern)
{
    validate_configuration(config);
    if (pattern.targets.size() != config.n()) throw std::invalid_argument("pattern size does not match n");
    for (const Robot& r : config.robots) {
        if (r.light != Light::off) throw std::invalid_argument("initial lights must be off");
    }
    if (unsolvable_initial(config)) throw std::invalid_argument("unsolvable initial configuration");
}

namespace {

std::optional<Scalar> exact_length(const Point& a, const Point& b)
{
    const Point d = b - a;
    if (sgn(d.x) == 0) return sgn(d.y) < 0 ? Scalar(-d.y) : d.y;
    if (sgn(d.y) == 0) return sgn(d.x) < 0 ? Scalar(-d.x) : d.x;
    Scalar l2 = squared_norm(d);
    l2.canonicalize();
    if (mpz_perfect_square_p(l2.get_num_mpz_t()) && mpz_perfect_square_p(l2.get_den_mpz_t())) {
        mpz_class num, den;
        mpz_sqrt(num.get_mpz_t(), l2.get_num_mpz_t());
        mpz_sqrt(den.get_mpz_t(), l2.get_den_mpz_t());
        return Scalar(num, den);
    }
    return std::nullopt;
}

Scalar manhattan(const Point& a, const Point& b)
{
    const Point d = b - a;
    return (sgn(d.x) < 0 ? Scalar(-d.x) : d.x) + (sgn(d.y) < 0 ? Scalar(-d.y) : d.y);
}

}  // namespace

std::vector<Point> truncate_move(const std::vector<Point>& path, const Scalar& requested, const Scalar& delta)
{
    if (path.size() < 2) return path;
    std::vector<std::optional<Scalar>> lens;
    bool all_exact = true;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        lens.push_back(exact_length(path[k], path[k + 1]));
        all_exact = all_exact && lens.back().has_value();
    }
    std::vector<Point> out{path.front()};
    if (all_exact) {
        Scalar total = 0;
        for (const auto& l : lens) total += *l;
        const Scalar floor_len = std::min(delta, total);
        const Scalar want = std::clamp(requested, floor_len, total);
        Scalar acc = 0;
        for (std::size_t k = 0; k < lens.size(); ++k) {
            const Scalar& l = *lens[k];
            if (want >= acc + l) {
                out.push_back(path[k + 1]);
                acc += l;
                if (want == acc) break;
                continue;
            }
            const Scalar f = (want - acc) / l;
            out.push_back(path[k] + f * (path[k + 1] - path[k]));
            break;
        }
        return out;
    }
    // Irrational segment lengths: never stop inside a segment, which only
    // lengthens the traversal and so keeps the delta guarantee.
    double total = 0;
    std::vector<double> dl;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        dl.push_back(std::sqrt(squared_distance(path[k], path[k + 1]).get_d()));
        total += dl.back();
    }
    const double want = std::clamp(requested.get_d(), std::min(delta.get_d(), total), total);
    double acc = 0;
    for (std::size_t k = 0; k < dl.size(); ++k) {
        out.push_back(path[k + 1]);
        acc += dl[k];
        if (acc >= want) break;
    }
    return out;
}

bool allowed_transition(Light from, Light to)
{
    using L = Light;
    static const std::vector<std::pair<L, L>> edges = {
        {L::off, L::terminal},        {L::off, L::interior},       {L::off, L::ready},
        {L::off, L::switch_off},      {L::interior, L::off},       {L::interior, L::ready},
        {L::interior, L::switch_off}, {L::terminal, L::failed},    {L::terminal, L::symmetry},
        {L::terminal, L::switch_off}, {L::terminal, L::off},       {L::failed, L::move},
        {L::move, L::off},            {L::symmetry, L::off},       {L::ready, L::off},
        {L::ready, L::switch_off},    {L::switch_off, L::leader},  {L::off, L::done},
        {L::leader, L::done},
        // A unique leftmost robot turns leader straight from off, and a
        // terminal of a later batch runs ElectLeader with its ready light.
        {L::off, L::leader},          {L::ready, L::failed},       {L::ready, L::symmetry},
    };
    if (from == to) return true;
    return std::find(edges.begin(), edges.end(), std::pair{from, to}) != edges.end();
}

std::vector<Violation> monitor_step(MonitorState& state, const Configuration& now, const TraceEvent& ev,
                                    std::size_t event_index, const std::vector<bool>& moving)
{
    std::vector<Violation> out;
    auto enabled = [&](std::string_view m) {
        return std::find(state.enabled.begin(), state.enabled.end(), m) != state.enabled.end();
    };
    auto flag = [&](std::string m, std::string msg) { out.push_back({std::move(m), event_index, ev.time, std::move(msg)}); };
    const std::size_t n = now.n();

    if (enabled("M1")) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const bool moved = state.prev_positions.size() == n &&
                                   (state.prev_positions[i] != now.robots[i].center ||
                                    state.prev_positions[j] != now.robots[j].center);
                Scalar d2;
                if (moved) {
                    // Both move linearly since the previous instant: closest approach of
                    // the relative motion is the distance from 0 to a segment.
                    const Point a = state.prev_positions[i] - state.prev_positions[j];
                    const Point b = now.robots[i].center - now.robots[j].center;
                    d2 = squared_distance_to_segment({Scalar(0), Scalar(0)}, a, b);
                } else if (state.prev_positions.size() != n || moving[i] || moving[j]) {
                    d2 = squared_distance(now.robots[i].center, now.robots[j].center);
                } else {
                    continue;
                }
                if (d2 < 1) {
                    flag("M1", "robots " + std::to_string(i) + " and " + std::to_string(j) +
                                   " closer than 1 (squared distance " + to_string(d2) + ")");
                }
            }
        }
    }
    state.prev_positions.resize(n);
    for (std::size_t i = 0; i < n; ++i) state.prev_positions[i] = now.robots[i].center;

    if (ev.kind == EventKind::LightSet) {
        if (ev.light == Light::leader || ev.light == Light::done) state.stage2 = true;
        if (enabled("M2")) {
            std::size_t leaders = 0, switches = 0;
            for (const Robot& r : now.robots) {
                leaders += r.light == Light::leader;
                switches += r.light == Light::switch_off;
            }
            if (leaders > 1) flag("M2", std::to_string(leaders) + " robots show leader");
            if (switches > 1) flag("M2", std::to_string(switches) + " robots show switch_off");
        }
        if (enabled("M4") && !allowed_transition(ev.previous_light, ev.light)) {
            flag("M4", "robot " + std::to_string(ev.robot) + " changed " + std::string(to_string(ev.previous_light)) +
                           " -> " + std::string(to_string(ev.light)));
        }
        if (enabled("M6") && ev.light == Light::leader && !is_leader_configuration(now)) {
            flag("M6", "robot " + std::to_string(ev.robot) + " set leader outside a leader configuration");
        }
    }

    if (ev.kind == EventKind::LookDone && ev.branch == "elect_leader" && enabled("M3")) {
        const Point& me = now.robots[ev.robot].center;
        std::optional<Scalar> gap;
        for (const Robot& r : now.robots) {
            if (r.center.x > me.x && (!gap || r.center.x - me.x < *gap)) gap = r.center.x - me.x;
        }
        if (gap && *gap < 2) {
            flag("M3", "robot " + std::to_string(ev.robot) + " ran ElectLeader " + to_string(*gap) +
                           " from the next robot on its right");
        }
    }

    if (ev.kind == EventKind::ComputeDone) {
        if (enabled("M5") && state.stage2 && moving[ev.robot]) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j != ev.robot && moving[j]) {
                    flag("M5", "robots " + std::to_string(ev.robot) + " and " + std::to_string(j) +
                                   " move together in Stage 2");
                }
            }
        }
        if (enabled("phase") && state.stage2 && ev.branch == "phase1") {
            const bool relapse = ev.waypoints.empty() && ev.light == Light::terminal;
            const bool noop = ev.waypoints.empty() && ev.light == ev.previous_light;
            if (!relapse && !noop) flag("phase", "robot " + std::to_string(ev.robot) + " acted in Phase 1 during Stage 2");
        }
    }
    return out;
}

namespace {

class Adversary {
public:
    explicit Adversary(std::uint64_t seed) : rng_(seed) {}
    std::uint64_t pick(std::uint64_t n) { return rng_() % n; }
    const Scalar& choose(const std::vector<Scalar>& menu) { return menu[pick(menu.size())]; }

private:
    std::mt19937_64 rng_;
};

std::vector<Scalar> menu(std::initializer_list<std::pair<long, long>> fr)
{
    std::vector<Scalar> out;
    for (auto [p, q] : fr) out.push_back(frac(p, q));
    return out;
}

const std::vector<Scalar> kStartOffsets = menu({{0, 1}, {1, 4}, {1, 2}, {1, 1}, {3, 2}, {2, 1}});
const std::vector<Scalar> kComputeDelays = menu({{1, 16}, {1, 4}, {1, 2}, {1, 1}, {2, 1}});
const std::vector<Scalar> kIdleGaps = menu({{1, 16}, {1, 4}, {1, 2}, {1, 1}, {2, 1}, {4, 1}});
const std::vector<Scalar> kTimePerUnit = menu({{1, 4}, {1, 2}, {1, 1}, {2, 1}});
const std::vector<Scalar> kStopFractions = menu({{1, 8}, {1, 4}, {1, 3}, {1, 2}, {2, 3}, {3, 4}, {7, 8}});

enum class Phase { idle, looked, moving };

struct Runtime {
    Point pos;  // idle: center; moving: start of the executed path
    Light light = Light::off;
    int chirality = 1;
    Phase phase = Phase::idle;
    Decision decision;
    std::vector<Point> path;
    std::vector<Scalar> times;
    std::size_t seg = 0;
    std::uint64_t last_activation = 0;
    std::uint64_t ticket = 0;
};

struct QueueItem {
    Scalar time;
    std::uint64_t seq;
    std::size_t robot;
    EventKind kind;
    std::uint64_t ticket;
};

struct Later {
    bool operator()(const QueueItem& a, const QueueItem& b) const
    {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

class Engine {
public:
    Engine(Configuration c, Pattern p, const SimParams& params) : params_(params), adv_(params.seed)
    {
        for (Robot& r : c.robots) r.center = canonical(r.center);
        for (Point& t : p.targets) t = canonical(t);
        pattern_ = p;
        result_.trace.params = params;
        result_.trace.initial = c;
        result_.trace.pattern = p;
        for (const Robot& r : c.robots) {
            Runtime rt;
            rt.pos = r.center;
            rt.light = r.light;
            rt.chirality = r.chirality;
            robots_.push_back(rt);
        }
        window_ = params.fairness_window ? params.fairness_window : 8 * static_cast<std::uint64_t>(c.n());
        monitors_.enabled = params.monitors;
    }

    RunResult run()
    {
        if (params_.mode == Mode::async) {
            run_async();
        } else {
            run_ssync();
        }
        result_.final_config = ground_truth(now_);
        result_.moves = count_moves(result_.trace);
        return std::move(result_);
    }

private:
    Pattern pattern_;
    SimParams params_;
    Adversary adv_;
    std::vector<Runtime> robots_;
    std::priority_queue<QueueItem, std::vector<QueueItem>, Later> queue_;
    std::uint64_t seq_ = 0;
    std::uint64_t window_ = 0;
    Scalar now_ = 0;
    MonitorState monitors_;
    VisibilityCache cache_;
    RunResult result_;
    std::uint64_t version_ = 1;
    std::uint64_t checked_version_ = 0;
    bool stop_ = false;

    Point position_at(std::size_t i, const Scalar& t) const
    {
        const Runtime& r = robots_[i];
        if (r.phase != Phase::moving) return r.pos;
        const std::size_t k = r.seg;
        const Scalar& t0 = r.times[k];
        const Scalar& t1 = r.times[k + 1];
        if (t >= t1) return r.path[k + 1];
        if (t <= t0) return r.path[k];
        const Scalar f = (t - t0) / (t1 - t0);
        return r.path[k] + f * (r.path[k + 1] - r.path[k]);
    }

    Configuration ground_truth(const Scalar& t) const
    {
        Configuration c;
        for (std::size_t i = 0; i < robots_.size(); ++i) {
            c.robots.push_back({position_at(i, t), robots_[i].light, robots_[i].chirality});
        }
        return c;
    }

    std::vector<bool> moving_flags() const
    {
        std::vector<bool> m;
        for (const Runtime& r : robots_) m.push_back(r.phase == Phase::moving);
        return m;
    }

    TraceEvent make(std::size_t i, EventKind k) const
    {
        TraceEvent e;
        e.time = now_;
        e.robot = i;
        e.kind = k;
        return e;
    }

    void schedule(std::size_t i, const Scalar& t, EventKind k)
    {
        queue_.push({t, seq_++, i, k, ++robots_[i].ticket});
    }

    void emit(TraceEvent ev)
    {
        if (stop_) return;
        if (!budget_left()) {
            stop_ = true;
            result_.status = RunStatus::budget;
            return;
        }
        const Configuration now = ground_truth(ev.time);
        ev.position = now.robots[ev.robot].center;
        if (ev.kind != EventKind::LightSet && ev.kind != EventKind::ComputeDone) ev.light = robots_[ev.robot].light;
        const std::size_t idx = result_.trace.events.size();
        const bool was_stage2 = monitors_.stage2;
        auto v = monitor_step(monitors_, now, ev, idx, moving_flags());
        if (ev.kind == EventKind::LightSet && ev.light == Light::leader && !result_.first_leader_event) {
            result_.first_leader_event = idx;
            result_.first_leader_configuration_ok = is_leader_configuration(now);
        }
        (was_stage2 ? result_.stage2_events : result_.stage1_events) += 1;
        result_.trace.events.push_back(std::move(ev));
        if (!v.empty()) {
            result_.violations.insert(result_.violations.end(), v.begin(), v.end());
            stop_ = true;
            result_.status = RunStatus::monitor;
        }
    }

    void fail(const std::string& monitor, const std::string& msg)
    {
        result_.violations.push_back({monitor, result_.trace.events.size(), now_, msg});
        result_.status = RunStatus::monitor;
        stop_ = true;
    }

    // Look and Compute happen at the activation instant; the decision is held
    // until ComputeDone.
    void look(std::size_t i)
    {
        Runtime& r = robots_[i];
        r.last_activation = result_.trace.events.size();
        emit(make(i, EventKind::Activate));
        if (stop_) return;

        std::vector<Disk> disks;
        std::vector<Point> pos;
        for (std::size_t j = 0; j < robots_.size(); ++j) {
            pos.push_back(position_at(j, now_));
            disks.push_back({pos.back()});
        }
        LocalSnapshot s;
        s.self_light = r.light;
        s.n = robots_.size();
        s.chirality = r.chirality;
        TraceEvent look_ev = make(i, EventKind::LookDone);
        bool sees_motion = false;
        for (std::size_t j = 0; j < robots_.size(); ++j) {
            if (j == i || !cache_.sees(disks, i, j)) continue;
            const Point rel = pos[j] - pos[i];
            s.visible.push_back({{rel.x, Scalar(r.chirality * rel.y)}, robots_[j].light});
            look_ev.seen.push_back(j);
            sees_motion = sees_motion || robots_[j].phase == Phase::moving;
        }
        if (sees_motion) ++result_.looks_seeing_motion;
        try {
            r.decision = compute(s, pattern_);
        } catch (const std::runtime_error& e) {
            look_ev.branch = "elect_leader";
            emit(std::move(look_ev));
            if (!stop_) fail("M3", "robot " + std::to_string(i) + ": " + e.what());
            return;
        }
        look_ev.branch = std::string(to_string(r.decision.branch));
        r.phase = Phase::looked;
        emit(std::move(look_ev));
    }

    // Applies the decision's light; returns the requested global path (start first).
    std::vector<Point> finish_compute(std::size_t i)
    {
        Runtime& r = robots_[i];
        const Decision& d = r.decision;
        TraceEvent ev = make(i, EventKind::ComputeDone);
        ev.branch = std::string(to_string(d.branch));
        ev.light = d.new_light;
        ev.previous_light = r.light;
        std::vector<Point> path{r.pos};
        for (const Point& w : d.plan.waypoints) {
            const Point g = r.pos + to_global(w, r.chirality);
            if (g != path.back()) path.push_back(g);
        }
        for (std::size_t k = 1; k < path.size(); ++k) ev.waypoints.push_back(path[k]);
        if (d.new_light != r.light) {
            const Light before = r.light;
            r.light = d.new_light;
            ++version_;
            emit(std::move(ev));
            if (stop_) return {};
            TraceEvent ls = make(i, EventKind::LightSet);
            ls.light = d.new_light;
            ls.previous_light = before;
            emit(std::move(ls));
        } else {
            emit(std::move(ev));
        }
        return path;
    }

    // Starts moving along `executed` (already truncated); returns false if there is no motion.
    bool start_move(std::size_t i, const std::vector<Point>& executed, const Scalar& time_per_unit)
    {
        Runtime& r = robots_[i];
        if (executed.size() < 2) return false;
        r.path = executed;
        r.times = {now_};
        for (std::size_t k = 0; k + 1 < executed.size(); ++k) {
            r.times.push_back(r.times.back() + time_per_unit * manhattan(executed[k], executed[k + 1]));
        }
        r.seg = 0;
        r.phase = Phase::moving;
        schedule(i, r.times[1], executed.size() == 2 ? EventKind::MoveEnd : EventKind::MoveProgress);
        return true;
    }

    void move_event(std::size_t i, EventKind kind)
    {
        Runtime& r = robots_[i];
        if (kind == EventKind::MoveProgress) {
            emit(make(i, EventKind::MoveProgress));
            ++r.seg;
            const bool last = r.seg + 2 == r.path.size();
            schedule(i, r.times[r.seg + 1], last ? EventKind::MoveEnd : EventKind::MoveProgress);
            return;
        }
        r.seg = r.path.size() - 2;
        emit(make(i, EventKind::MoveEnd));
        r.pos = r.path.back();
        r.phase = Phase::idle;
        r.path.clear();
        r.times.clear();
        ++version_;
    }

    bool quiescent() const
    {
        for (const Runtime& r : robots_) {
            if (r.phase == Phase::moving) return false;
            if (r.phase == Phase::looked && !is_noop(r.decision, r.light)) return false;
        }
        return true;
    }

    bool check_final()
    {
        if (!quiescent() || checked_version_ == version_) return false;
        checked_version_ = version_;
        try {
            Configuration c = ground_truth(now_);
            return is_final_configuration(c, pattern_, cache_);
        } catch (const std::runtime_error&) {
            return false;
        }
    }

    bool budget_left() const { return result_.trace.events.size() < params_.max_events; }

    void run_async()
    {
        for (std::size_t i = 0; i < robots_.size(); ++i) schedule(i, adv_.choose(kStartOffsets), EventKind::Activate);
        while (!queue_.empty()) {
            if (!budget_left()) {
                result_.status = RunStatus::budget;
                return;
            }
            const QueueItem item = queue_.top();
            queue_.pop();
            if (item.ticket != robots_[item.robot].ticket) continue;
            now_ = item.time;
            const std::size_t i = item.robot;
            switch (item.kind) {
            case EventKind::Activate:
                look(i);
                if (!stop_ && robots_[i].phase == Phase::looked) {
                    schedule(i, now_ + adv_.choose(kComputeDelays), EventKind::ComputeDone);
                }
                break;
            case EventKind::ComputeDone: {
                const auto path = finish_compute(i);
                if (stop_) break;
                robots_[i].phase = Phase::idle;
                std::vector<Point> executed = path;
                if (path.size() >= 2 && adv_.pick(2) == 0) {
                    Scalar total = 0;
                    for (std::size_t k = 0; k + 1 < path.size(); ++k) total += manhattan(path[k], path[k + 1]);
                    executed = truncate_move(path, total * adv_.choose(kStopFractions), params_.delta);
                }
                if (!start_move(i, executed, adv_.choose(kTimePerUnit))) {
                    schedule(i, now_ + adv_.choose(kIdleGaps), EventKind::Activate);
                } else if (std::find(monitors_.enabled.begin(), monitors_.enabled.end(), "M5") !=
                               monitors_.enabled.end() &&
                           monitors_.stage2) {
                    check_serialization(i);
                }
                break;
            }
            case EventKind::MoveProgress:
            case EventKind::MoveEnd:
                move_event(i, item.kind);
                if (!stop_ && item.kind == EventKind::MoveEnd) {
                    schedule(i, now_ + adv_.choose(kIdleGaps), EventKind::Activate);
                }
                break;
            default: break;
            }
            if (stop_) return;
            enforce_fairness();
            if (check_final()) {
                result_.status = RunStatus::final;
                return;
            }
        }
    }

    void check_serialization(std::size_t i)
    {
        for (std::size_t j = 0; j < robots_.size(); ++j) {
            if (j != i && robots_[j].phase == Phase::moving) {
                fail("M5", "robots " + std::to_string(i) + " and " + std::to_string(j) + " move together in Stage 2");
                return;
            }
        }
    }

    // An idle robot that has not been activated for a full window is activated now.
    void enforce_fairness()
    {
        const std::uint64_t count = result_.trace.events.size();
        for (std::size_t i = 0; i < robots_.size(); ++i) {
            Runtime& r = robots_[i];
            if (r.phase == Phase::idle && count - r.last_activation >= window_) {
                r.last_activation = count;
                schedule(i, now_, EventKind::Activate);
            }
        }
    }

    void run_ssync()
    {
        std::vector<std::uint64_t> idle_rounds(robots_.size(), 0);
        const Scalar quarter(1, 4);
        for (std::uint64_t round = 0;; ++round) {
            if (!budget_left()) {
                result_.status = RunStatus::budget;
                return;
            }
            const Scalar start(static_cast<long>(round));
            now_ = start;
            std::vector<std::size_t> active;
            for (std::size_t i = 0; i < robots_.size(); ++i) {
                const bool forced = idle_rounds[i] + 1 >= 4;
                if (params_.ssync_all || forced || adv_.pick(2) == 0) active.push_back(i);
            }
            if (active.empty()) active.push_back(adv_.pick(robots_.size()));
            for (std::size_t i = 0; i < robots_.size(); ++i) ++idle_rounds[i];
            for (std::size_t i : active) idle_rounds[i] = 0;

            // Everyone looks at the same configuration.
            for (std::size_t i : active) {
                look(i);
                if (stop_) return;
            }
            now_ = start + quarter;
            std::vector<std::vector<Point>> paths;
            // Lights switch together, then monitors see the settled lights.
            for (std::size_t i : active) {
                Runtime& r = robots_[i];
                paths.push_back(finish_compute_quiet(i));
                (void)r;
            }
            for (std::size_t k = 0; k < active.size(); ++k) {
                emit_compute_events(active[k], paths[k]);
                if (stop_) return;
            }
            std::size_t movers = 0;
            for (std::size_t k = 0; k < active.size(); ++k) {
                const std::size_t i = active[k];
                robots_[i].phase = Phase::idle;
                Scalar total = 0;
                for (std::size_t s = 0; s + 1 < paths[k].size(); ++s) total += manhattan(paths[k][s], paths[k][s + 1]);
                if (sgn(total) == 0) continue;
                ++movers;
                start_move(i, paths[k], frac(1, 2) / total);
            }
            if (monitors_.stage2 && movers > 1 &&
                std::find(monitors_.enabled.begin(), monitors_.enabled.end(), "M5") != monitors_.enabled.end()) {
                fail("M5", std::to_string(movers) + " robots move together in Stage 2");
                return;
            }
            while (!queue_.empty()) {
                const QueueItem item = queue_.top();
                queue_.pop();
                if (item.ticket != robots_[item.robot].ticket) continue;
                now_ = item.time;
                move_event(item.robot, item.kind);
                if (stop_) return;
            }
            now_ = start + 1;
            if (check_final()) {
                result_.status = RunStatus::final;
                return;
            }
        }
    }

    // SSYNC: apply the light immediately so simultaneous switches are settled
    // before any monitor looks at them.
    std::vector<Point> finish_compute_quiet(std::size_t i)
    {
        Runtime& r = robots_[i];
        pending_previous_.resize(robots_.size());
        pending_previous_[i] = r.light;
        if (r.decision.new_light != r.light) {
            r.light = r.decision.new_light;
            ++version_;
        }
        std::vector<Point> path{r.pos};
        for (const Point& w : r.decision.plan.waypoints) {
            const Point g = r.pos + to_global(w, r.chirality);
            if (g != path.back()) path.push_back(g);
        }
        return path;
    }

    void emit_compute_events(std::size_t i, const std::vector<Point>& path)
    {
        const Runtime& r = robots_[i];
        TraceEvent ev = make(i, EventKind::ComputeDone);
        ev.branch = std::string(to_string(r.decision.branch));
        ev.light = r.decision.new_light;
        ev.previous_light = pending_previous_[i];
        for (std::size_t k = 1; k < path.size(); ++k) ev.waypoints.push_back(path[k]);
        emit(std::move(ev));
        if (stop_ || pending_previous_[i] == r.light) return;
        TraceEvent ls = make(i, EventKind::LightSet);
        ls.light = r.light;
        ls.previous_light = pending_previous_[i];
        emit(std::move(ls));
    }

    std::vector<Light> pending_previous_;
};

}  // namespace

RunResult simulate(const Configuration& config, const Pattern& pattern, const SimParams& params)
{
    check_run_preconditions(config, pattern);
    Engine e(config, pattern, params);
    return e.run();
}

Trace run(const Configuration& config, const Pattern& pattern, const SimParams& params)
{
    RunResult r = simulate(config, pattern, params);
    if (r.status == RunStatus::budget) {
        throw SimulationError("non-termination within budget", std::move(r));
    }
    if (r.status == RunStatus::monitor) {
        const Violation& v = r.violations.front();
        throw SimulationError("monitor " + v.monitor + " violated at event " + std::to_string(v.event_index) + ": " +
                                  v.message,
                              std::move(r));
    }
    return std::move(r.trace);
}

std::uint64_t count_moves(const Trace& t)
{
    std::vector<Point> start(t.initial.n());
    std::uint64_t moves = 0;
    for (const TraceEvent& e : t.events) {
        if (e.kind == EventKind::ComputeDone) start[e.robot] = e.position;
        if (e.kind == EventKind::MoveEnd && e.position != start[e.robot]) ++moves;
    }
    return moves;
}

Configuration replay(const Trace& t)
{
    Configuration c = t.initial;
    for (const TraceEvent& e : t.events) {
        switch (e.kind) {
        case EventKind::LightSet: c.robots[e.robot].light = e.light; break;
        case EventKind::MoveProgress:
        case EventKind::MoveEnd: c.robots[e.robot].center = e.position; break;
        default: break;
        }
    }
    return c;
}

}  // namespace apf
