#include "apf/robot_algorithm.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace apf {
namespace {

Scalar abs_of(const Scalar& s) { return sgn(s) < 0 ? Scalar(-s) : s; }

// The robot's own view: index 0 is self at the origin.
struct View {
    std::vector<Point> pos;
    std::vector<Light> light;
    std::vector<Batch> batches;
    std::size_t self_batch = 0;

    explicit View(const LocalSnapshot& s)
    {
        pos.reserve(s.visible.size() + 1);
        light.reserve(s.visible.size() + 1);
        pos.push_back({Scalar(0), Scalar(0)});
        light.push_back(s.self_light);
        for (const SeenRobot& r : s.visible) {
            pos.push_back(r.pos);
            light.push_back(r.light);
        }
        batches = partition_batches(pos);
        for (std::size_t b = 0; b < batches.size(); ++b) {
            if (sgn(batches[b].axis_x) == 0) self_batch = b;
        }
    }

    const Batch& own() const { return batches[self_batch]; }
    const Batch* left() const { return self_batch > 0 ? &batches[self_batch - 1] : nullptr; }
    const Batch* right() const { return self_batch + 1 < batches.size() ? &batches[self_batch + 1] : nullptr; }
    bool in_first_batch() const { return self_batch == 0; }
    bool self_terminal() const { return is_terminal(own(), 0); }

    bool any_light(Light l) const { return std::find(light.begin(), light.end(), l) != light.end(); }

    // Both terminals of `b` show `t` and every member between them is off.
    bool terminals_show(const Batch* b, Light t) const
    {
        if (b == nullptr || b->members.size() < 2) return false;
        for (std::size_t k = 0; k < b->members.size(); ++k) {
            const bool term = k == 0 || k + 1 == b->members.size();
            if (light[b->members[k]] != (term ? t : Light::off)) return false;
        }
        return true;
    }
};

Decision stay(const LocalSnapshot& s, Branch b) { return {s.self_light, {}, b}; }

Decision set_light(Light l, Branch b) { return {l, {}, b}; }

Decision move_left(const LocalSnapshot& s, const Scalar& d, Branch b)
{
    Decision out = stay(s, b);
    if (sgn(d) > 0) out.plan.waypoints.push_back({Scalar(-d), Scalar(0)});
    return out;
}

Scalar phase1_gap(std::size_t n) { return frac(static_cast<long>(n) + 3, 2); }
Scalar batch_spacing(std::size_t n) { return 1 + frac(1, static_cast<long>(n)); }

bool wants_phase2(const View& v, std::size_t n)
{
    if (v.batches.size() >= 2) {
        const Batch& b1 = v.batches[0];
        const Batch& b2 = v.batches[1];
        const bool two_terminals = b1.members.size() == 2 && v.light[b1.members[0]] == Light::terminal &&
                                   v.light[b1.members[1]] == Light::terminal;
        bool uniform = true;
        for (std::size_t m : b2.members) uniform = uniform && v.light[m] == v.light[b2.members.front()];
        if (two_terminals && uniform && b2.axis_x - b1.axis_x >= phase1_gap(n)) return true;
    }
    for (Light l : v.light) {
        switch (l) {
        case Light::failed:
        case Light::symmetry:
        case Light::ready:
        case Light::move:
        case Light::switch_off: return true;
        default: break;
        }
    }
    return false;
}

}  // namespace

std::string_view to_string(Branch b)
{
    switch (b) {
    case Branch::stage2: return "stage2";
    case Branch::phase1: return "phase1";
    case Branch::phase2: return "phase2";
    case Branch::elect_leader: return "elect_leader";
    case Branch::become_leader: return "become_leader";
    }
    return "?";
}

bool is_noop(const Decision& d, Light current) { return d.new_light == current && d.plan.empty(); }

Point to_global(const Point& local, int chirality)
{
    return chirality == 1 ? local : Point{local.x, Scalar(-local.y)};
}

Decision compute(const LocalSnapshot& s, const Pattern& pattern)
{
    if (s.self_light == Light::leader || s.self_light == Light::done) return stage2_compute(s, pattern);
    for (const SeenRobot& r : s.visible) {
        // Done lights only ever appear once a leader exists.
        if (r.light == Light::leader || r.light == Light::done) return stage2_compute(s, pattern);
    }
    const View v(s);
    if (wants_phase2(v, s.n)) return phase2_compute(s);
    return phase1_compute(s);
}

Decision phase1_compute(const LocalSnapshot& s)
{
    const View v(s);
    const Batch& own = v.own();
    const Scalar gap = phase1_gap(s.n);

    auto on_my_axis_with = [&](Light l) {
        for (std::size_t m : own.members) {
            if (m != 0 && v.light[m] == l) return true;
        }
        return false;
    };

    if (s.self_light == Light::off) {
        if (v.in_first_batch() && own.members.size() == 1) return become_leader(s);
        if (v.in_first_batch()) {
            return set_light(v.self_terminal() ? Light::terminal : Light::interior, Branch::phase1);
        }
        if (on_my_axis_with(Light::interior)) {
            if (!v.self_terminal()) return set_light(Light::interior, Branch::phase1);
            std::optional<std::size_t> only_left;
            std::size_t left_count = 0;
            for (std::size_t k = 1; k < v.pos.size(); ++k) {
                if (sgn(v.pos[k].x) < 0) {
                    ++left_count;
                    only_left = k;
                }
            }
            if (left_count == 1 && v.light[*only_left] == Light::terminal) {
                Decision d = move_left(s, gap, Branch::phase1);
                d.new_light = Light::terminal;
                return d;
            }
        }
        return stay(s, Branch::phase1);
    }

    if (s.self_light == Light::terminal) {
        if (on_my_axis_with(Light::interior)) return move_left(s, gap, Branch::phase1);
        if (on_my_axis_with(Light::terminal)) {
            std::optional<Scalar> leftmost_right;
            for (std::size_t k = 1; k < v.pos.size(); ++k) {
                if (sgn(v.pos[k].x) > 0 && (!leftmost_right || v.pos[k].x < *leftmost_right)) {
                    leftmost_right = v.pos[k].x;
                }
            }
            if (leftmost_right && *leftmost_right < gap) return move_left(s, gap - *leftmost_right, Branch::phase1);
            return stay(s, Branch::phase1);
        }
        // An off neighbour on my axis has not turned interior yet; leaving now
        // would make it terminal of the second batch and freeze it off.
        if (on_my_axis_with(Light::off)) return stay(s, Branch::phase1);
        // Align with a terminal-lit robot on the left; the nearest one if several.
        std::optional<Scalar> d;
        for (std::size_t k = 1; k < v.pos.size(); ++k) {
            if (sgn(v.pos[k].x) < 0 && v.light[k] == Light::terminal) {
                const Scalar dist = -v.pos[k].x;
                if (!d || dist < *d) d = dist;
            }
        }
        if (d) return move_left(s, *d, Branch::phase1);
    }
    return stay(s, Branch::phase1);
}

Decision phase2_compute(const LocalSnapshot& s)
{
    if (s.self_light == Light::switch_off) return become_leader(s);
    const View v(s);

    for (const Batch* b : {&v.own(), v.left(), v.right()}) {
        if (b == nullptr) continue;
        for (std::size_t m : b->members) {
            if (m != 0 && v.light[m] == Light::switch_off) return set_light(Light::off, Branch::phase2);
        }
    }

    switch (s.self_light) {
    case Light::off:
    case Light::interior: {
        const Batch* left = v.left();
        if (v.terminals_show(left, Light::failed)) return set_light(Light::ready, Branch::phase2);
        if (v.terminals_show(left, Light::symmetry)) {
            const Point& a = v.pos[left->members.front()];
            const Point& b = v.pos[left->members.back()];
            if (squared_norm(a) == squared_norm(b)) return set_light(Light::switch_off, Branch::phase2);
        }
        return stay(s, Branch::phase2);
    }
    case Light::terminal: return elect_leader(s);
    case Light::failed: {
        const Batch* right = v.right();
        if (right == nullptr) return stay(s, Branch::phase2);
        for (std::size_t m : right->members) {
            if (v.light[m] != Light::ready) return stay(s, Branch::phase2);
        }
        return set_light(Light::move, Branch::phase2);
    }
    case Light::ready: {
        std::optional<Scalar> leftmost_ready;
        for (std::size_t k = 1; k < v.pos.size(); ++k) {
            if (sgn(v.pos[k].x) < 0 && v.light[k] == Light::ready) {
                if (!leftmost_ready || v.pos[k].x < *leftmost_ready) leftmost_ready = v.pos[k].x;
            }
        }
        if (leftmost_ready) return move_left(s, -*leftmost_ready, Branch::phase2);
        const Batch* left = v.left();
        if (left == nullptr || left->members.size() < 2 || v.light[left->members.front()] != Light::move ||
            v.light[left->members.back()] != Light::move) {
            return stay(s, Branch::phase2);
        }
        const Scalar d = -left->axis_x;
        const Scalar target = batch_spacing(s.n);
        if (d > target) return move_left(s, d - target, Branch::phase2);
        if (d == target) {
            for (std::size_t k = 1; k < v.pos.size(); ++k) {
                if (sgn(v.pos[k].x) > 0 && v.light[k] == Light::ready) return stay(s, Branch::phase2);
            }
            if (v.self_terminal()) return elect_leader(s);
            return set_light(Light::off, Branch::phase2);
        }
        return stay(s, Branch::phase2);
    }
    default: return stay(s, Branch::phase2);
    }
}

Decision elect_leader(const LocalSnapshot& s)
{
    const View v(s);
    Decision keep = stay(s, Branch::elect_leader);
    Scalar line_y;
    if (v.in_first_batch()) {
        const Batch& own = v.own();
        if (own.members.size() != 2) return keep;
        const std::size_t other = own.members.front() == 0 ? own.members.back() : own.members.front();
        line_y = v.pos[other].y / 2;
    } else {
        const Batch* left = v.left();
        if (left->members.size() < 2) return keep;
        line_y = (v.pos[left->members.front()].y + v.pos[left->members.back()].y) / 2;
    }
    const Batch* right = v.right();
    if (right == nullptr) return keep;
    if (right->axis_x < 2) throw std::runtime_error("spacing violation");

    const SymmetryVerdict verdict = batch_symmetry_verdict(v.pos, *right, line_y);
    switch (verdict.kind) {
    case SymmetryVerdict::Kind::symmetric_with_center: keep.new_light = Light::symmetry; break;
    case SymmetryVerdict::Kind::symmetric_no_center: keep.new_light = Light::failed; break;
    case SymmetryVerdict::Kind::asymmetric: {
        const int side = sgn(Scalar(-line_y));  // my side of the line
        const Half mine = side > 0 ? Half::up : side < 0 ? Half::down : Half::none;
        if (mine == verdict.dominant) keep.new_light = Light::switch_off;
        break;
    }
    }
    return keep;
}

Decision become_leader(const LocalSnapshot& s)
{
    const View v(s);
    Decision keep = stay(s, Branch::become_leader);

    for (const Batch* b : {&v.own(), v.left(), v.right()}) {
        if (b == nullptr) continue;
        for (std::size_t m : b->members) {
            if (m != 0 && v.light[m] != Light::off) return keep;
        }
    }

    const auto& others = s.visible;
    int side = 0;
    bool vertical_ok = true;
    for (const SeenRobot& o : others) {
        const int sy = sgn(o.pos.y);
        if (sy == 0 || (side != 0 && sy != side) || abs_of(o.pos.y) < 2) vertical_ok = false;
        if (side == 0) side = sy;
    }

    if (!vertical_ok) {
        bool up_blocked = false, down_blocked = false;
        for (const SeenRobot& o : others) {
            if (abs_of(o.pos.x) >= 1) continue;
            if (sgn(o.pos.y) > 0) up_blocked = true;
            if (sgn(o.pos.y) < 0) down_blocked = true;
        }
        if (up_blocked && down_blocked) {
            // Sandwiched inside a batch: one unit left clears the column.
            return move_left(s, Scalar(1), Branch::become_leader);
        }
        const bool go_down = !down_blocked;
        Scalar y = others.empty() ? Scalar(0) : others.front().pos.y;
        for (const SeenRobot& o : others) y = go_down ? std::min(y, o.pos.y) : std::max(y, o.pos.y);
        keep.plan.waypoints.push_back({Scalar(0), go_down ? Scalar(y - 2) : Scalar(y + 2)});
        return keep;
    }

    std::optional<Scalar> nearest_left;
    bool shares_axis = false;
    for (const SeenRobot& o : others) {
        const int sx = sgn(o.pos.x);
        if (sx < 0 && (!nearest_left || o.pos.x > *nearest_left)) nearest_left = o.pos.x;
        if (sx == 0) shares_axis = true;
    }
    if (nearest_left) {
        keep.plan.waypoints.push_back({*nearest_left, Scalar(0)});
        return keep;
    }
    if (shares_axis) return move_left(s, Scalar(1), Branch::become_leader);

    for (const SeenRobot& o : others) {
        if (o.light != Light::off) return keep;
    }
    keep.new_light = Light::leader;
    return keep;
}

std::vector<Point> embed_pattern(const Pattern& pattern, std::size_t n)
{
    std::vector<Point> t(pattern.targets.begin(), pattern.targets.end());
    if (t.size() != n) throw std::invalid_argument("pattern size does not match n");
    std::sort(t.begin(), t.end(), [](const Point& a, const Point& b) {
        if (a.y != b.y) return a.y > b.y;
        return a.x > b.x;
    });
    return t;
}

namespace {

// Stage 2 coordinates: the leader starts at (0, -2) and up is the side the
// other robots occupy. Routes use the lane y = -1 between the leader's line
// and the targets.
struct AgreedFrame {
    Point origin_local;  // local position of the agreed point `origin_agreed`
    Point origin_agreed;
    int up = 1;          // local y sign of agreed up

    Point agreed(const Point& local) const
    {
        return {Scalar(local.x - origin_local.x + origin_agreed.x),
                Scalar(up * (local.y - origin_local.y) + origin_agreed.y)};
    }
    Point local(const Point& a) const
    {
        return {Scalar(a.x - origin_agreed.x + origin_local.x),
                Scalar(up * (a.y - origin_agreed.y) + origin_local.y)};
    }
};

const Scalar& lane_y()
{
    static const Scalar y(-1);
    return y;
}

MotionPlan route(const AgreedFrame& f, const Point& from, const Point& to)
{
    MotionPlan plan;
    if (from == to) return plan;
    std::vector<Point> pts;
    if (from.x == to.x) {
        pts.push_back(to);
    } else {
        if (from.y != lane_y()) pts.push_back({from.x, lane_y()});
        pts.push_back({to.x, lane_y()});
        if (to.y != lane_y()) pts.push_back(to);
    }
    for (const Point& p : pts) plan.waypoints.push_back(f.local(p));
    return plan;
}

Decision go_to(const LocalSnapshot& s, const AgreedFrame& f, const Point& me, const Point& target)
{
    Decision d = stay(s, Branch::stage2);
    if (me == target) {
        d.new_light = Light::done;
    } else {
        d.plan = route(f, me, target);
    }
    return d;
}

Decision leader_stage2(const LocalSnapshot& s, const std::vector<Point>& targets)
{
    Decision keep = stay(s, Branch::stage2);
    std::vector<Point> done;
    for (const SeenRobot& r : s.visible) {
        if (r.light == Light::off) return keep;
        if (r.light == Light::done) done.push_back(r.pos);
    }
    if (done.empty() || s.n < 2) return keep;
    int up = 1;
    for (const Point& p : done) {
        if (sgn(p.y) != 0) {
            up = sgn(p.y);
            break;
        }
    }
    // The lowest, then leftmost, done robot occupies t_{n-2}.
    const Point* anchor = &done.front();
    for (const Point& p : done) {
        const Scalar ay = up * anchor->y, py = up * p.y;
        if (py < ay || (py == ay && p.x < anchor->x)) anchor = &p;
    }
    const AgreedFrame f{*anchor, targets[s.n - 2], up};
    return go_to(s, f, f.agreed({Scalar(0), Scalar(0)}), targets[s.n - 1]);
}

}  // namespace

Decision stage2_compute(const LocalSnapshot& s, const Pattern& pattern)
{
    Decision keep = stay(s, Branch::stage2);
    if (s.self_light == Light::done) return keep;
    const std::vector<Point> targets = embed_pattern(pattern, s.n);
    if (s.self_light == Light::leader) return leader_stage2(s, targets);
    if (s.self_light != Light::off) return keep;

    const SeenRobot* leader = nullptr;
    for (const SeenRobot& r : s.visible) {
        if (r.light == Light::leader) leader = &r;
    }
    if (leader == nullptr) return keep;

    const Point& lp = leader->pos;
    int up = sgn(Scalar(-lp.y));
    if (up == 0) {
        up = 1;
        for (const SeenRobot& r : s.visible) {
            if (r.pos.y != lp.y) {
                up = sgn(Scalar(r.pos.y - lp.y));
                break;
            }
        }
    }
    const AgreedFrame f{lp, {Scalar(0), Scalar(-2)}, up};
    const Point me = f.agreed({Scalar(0), Scalar(0)});
    const Scalar line(-2);

    struct Other {
        Point at;
        Light light;
    };
    std::vector<Other> others;
    std::vector<Scalar> line_x;
    bool any_done = false;
    for (const SeenRobot& r : s.visible) {
        if (&r == leader) continue;
        others.push_back({f.agreed(r.pos), r.light});
        if (others.back().at.y == line) line_x.push_back(others.back().at.x);
        any_done = any_done || r.light == Light::done;
    }
    std::sort(line_x.begin(), line_x.end());
    auto line_is = [&](long first) {
        for (std::size_t k = 0; k < line_x.size(); ++k) {
            if (line_x[k] != first + static_cast<long>(k)) return false;
        }
        return true;
    };
    const long n = static_cast<long>(s.n);

    if (me.y > line) {
        for (const Other& o : others) {
            if (o.at.y > line && o.at.y < me.y) return keep;
            if (o.at.y == me.y && o.at.x < me.x) return keep;
        }
        if (line_x.empty()) {
            if (any_done) return go_to(s, f, me, targets[s.n - 2]);
            return go_to(s, f, me, {Scalar(1), line});
        }
        const long i = static_cast<long>(line_x.size());
        if (line_is(1)) return go_to(s, f, me, {Scalar(i + 1), line});
        if (line_is(n - i)) return go_to(s, f, me, targets[static_cast<std::size_t>(n - i - 2)]);
        return keep;
    }

    if (me.y == line) {
        for (const Other& o : others) {
            if (o.at.y > line && o.light == Light::off) return keep;
            if (o.at.y == line && sgn(o.at.x) > 0 && o.at.x < me.x) return keep;
        }
        if (me.x.get_den() != 1) return keep;
        const mpz_class& i = me.x.get_num();
        if (i < 1 || i > n - 1) return keep;
        return go_to(s, f, me, targets[i.get_ui() - 1]);
    }
    return keep;
}

LocalSnapshot take_snapshot(std::span<const Point> positions, std::span<const Light> lights, std::size_t i,
                            int chirality, VisibilityCache& cache)
{
    std::vector<Disk> disks;
    disks.reserve(positions.size());
    for (const Point& p : positions) disks.push_back({p});
    LocalSnapshot s;
    s.self_light = lights[i];
    s.n = positions.size();
    s.chirality = chirality;
    for (std::size_t j = 0; j < positions.size(); ++j) {
        if (j == i || !cache.sees(disks, i, j)) continue;
        const Point rel = positions[j] - positions[i];
        s.visible.push_back({{rel.x, Scalar(chirality * rel.y)}, lights[j]});
    }
    return s;
}

LocalSnapshot take_snapshot(const Configuration& c, std::size_t i, VisibilityCache& cache)
{
    std::vector<Point> pos;
    std::vector<Light> lights;
    for (const Robot& r : c.robots) {
        pos.push_back(r.center);
        lights.push_back(r.light);
    }
    return take_snapshot(pos, lights, i, c.robots[i].chirality, cache);
}

bool is_final_configuration(const Configuration& c, const Pattern& pattern, VisibilityCache& cache)
{
    for (std::size_t i = 0; i < c.n(); ++i) {
        const LocalSnapshot s = take_snapshot(c, i, cache);
        if (!is_noop(compute(s, pattern), c.robots[i].light)) return false;
    }
    return true;
}

}  // namespace apf
