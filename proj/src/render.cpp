#include "apf/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace apf {

namespace {

constexpr double kScale = 40.0;  // pixels per unit
constexpr double kMargin = 1.0;  // units around the bounding box

const char* fill_for(Light l)
{
    switch (l) {
    case Light::off: return "#d9d9d9";
    case Light::terminal: return "#1f77b4";
    case Light::interior: return "#aec7e8";
    case Light::failed: return "#d62728";
    case Light::symmetry: return "#9467bd";
    case Light::ready: return "#2ca02c";
    case Light::move: return "#ff7f0e";
    case Light::switch_off: return "#8c564b";
    case Light::leader: return "#e377c2";
    case Light::done: return "#17becf";
    }
    return "#000000";
}

struct Box {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    bool empty = true;
    void add(const Point& p)
    {
        const double x = p.x.get_d(), y = p.y.get_d();
        if (empty) {
            x0 = x1 = x;
            y0 = y1 = y;
            empty = false;
            return;
        }
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Pattern points in global coordinates once a leader exists: the leader's
// position at that moment is (0, -2) and up is the side of the other robots.
// The first robot to turn done sits on t_0, which settles the orientation.
std::optional<std::vector<Point>> global_targets(const Trace& t, std::size_t& leader_event)
{
    Configuration c = t.initial;
    std::optional<Point> origin;
    int up = 1;
    std::vector<Point> targets;
    try {
        targets = embed_pattern(t.pattern, t.initial.n());
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
    auto place = [&](int u) {
        std::vector<Point> out;
        for (const Point& p : targets) out.push_back({origin->x + p.x, origin->y + Scalar(u) * (p.y + 2)});
        return out;
    };
    for (std::size_t k = 0; k < t.events.size(); ++k) {
        const TraceEvent& e = t.events[k];
        if (e.kind == EventKind::MoveProgress || e.kind == EventKind::MoveEnd) c.robots[e.robot].center = e.position;
        if (e.kind != EventKind::LightSet) continue;
        c.robots[e.robot].light = e.light;
        if (e.light == Light::leader && !origin) {
            origin = c.robots[e.robot].center;
            leader_event = k;
            for (const Robot& r : c.robots) {
                if (r.center.y != origin->y) {
                    up = sgn(Scalar(r.center.y - origin->y));
                    break;
                }
            }
        } else if (e.light == Light::done && origin && e.previous_light == Light::off) {
            if (place(-up).front() == c.robots[e.robot].center) up = -up;
            return place(up);
        }
    }
    if (!origin) return std::nullopt;
    return place(up);
}

std::string frame_svg(const Configuration& c, const Box& box, const std::vector<Point>* targets, std::size_t event,
                      std::size_t total, const std::string& time)
{
    const double w = (box.x1 - box.x0 + 2 * kMargin) * kScale;
    const double h = (box.y1 - box.y0 + 2 * kMargin) * kScale;
    auto px = [&](const Scalar& x) { return (x.get_d() - box.x0 + kMargin) * kScale; };
    auto py = [&](const Scalar& y) { return (box.y1 - y.get_d() + kMargin) * kScale; };

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" viewBox=\"0 0 " << num(w) << " " << num(h) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const auto centers = c.centers();
    const auto batches = partition_batches(centers);
    for (const Batch& b : batches) {
        s << "<line class=\"axis\" x1=\"" << num(px(b.axis_x)) << "\" y1=\"0\" x2=\"" << num(px(b.axis_x)) << "\" y2=\""
          << num(h) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4,4\"/>\n";
    }
    bool stage2 = false;
    for (const Robot& r : c.robots) stage2 = stage2 || r.light == Light::leader || r.light == Light::done;
    if (!stage2 && !batches.empty() && batches.front().members.size() >= 2) {
        const Batch& b = batches.front();
        const Scalar ly = (centers[b.members.front()].y + centers[b.members.back()].y) / 2;
        s << "<line class=\"L\" x1=\"0\" y1=\"" << num(py(ly)) << "\" x2=\"" << num(w) << "\" y2=\"" << num(py(ly))
          << "\" stroke=\"#d62728\" stroke-width=\"1\"/>\n";
    }
    if (targets != nullptr) {
        const double arm = 0.2 * kScale;
        for (const Point& t : *targets) {
            const double x = px(t.x), y = py(t.y);
            s << "<path class=\"target\" d=\"M" << num(x - arm) << " " << num(y - arm) << " L" << num(x + arm) << " "
              << num(y + arm) << " M" << num(x - arm) << " " << num(y + arm) << " L" << num(x + arm) << " "
              << num(y - arm) << "\" stroke=\"#333333\" stroke-width=\"2\"/>\n";
        }
    }
    for (std::size_t i = 0; i < c.n(); ++i) {
        const Robot& r = c.robots[i];
        s << "<circle class=\"robot\" cx=\"" << num(px(r.center.x)) << "\" cy=\"" << num(py(r.center.y)) << "\" r=\""
          << num(0.5 * kScale) << "\" fill=\"" << fill_for(r.light) << "\" fill-opacity=\"0.8\" stroke=\"black\"/>\n"
          << "<text x=\"" << num(px(r.center.x)) << "\" y=\"" << num(py(r.center.y) + 4)
          << "\" font-size=\"11\" text-anchor=\"middle\">" << i << "</text>\n";
    }
    s << "<text x=\"6\" y=\"16\" font-size=\"13\">event " << event << " / " << total << ", t = " << time
      << "</text>\n</svg>\n";
    return s.str();
}

}  // namespace

std::vector<std::string> render_frames(const Trace& t, std::size_t every)
{
    if (every == 0) every = 1;
    Box box;
    for (const Robot& r : t.initial.robots) box.add(r.center);
    for (const TraceEvent& e : t.events) box.add(e.position);
    std::size_t leader_event = t.events.size();
    const auto targets = global_targets(t, leader_event);
    if (targets) {
        for (const Point& p : *targets) box.add(p);
    }

    std::vector<std::string> frames;
    Configuration c = t.initial;
    if (t.events.empty()) {
        frames.push_back(frame_svg(c, box, nullptr, 0, 0, "0"));
        return frames;
    }
    for (std::size_t k = 0; k < t.events.size(); ++k) {
        const TraceEvent& e = t.events[k];
        if (e.kind == EventKind::MoveProgress || e.kind == EventKind::MoveEnd) c.robots[e.robot].center = e.position;
        if (e.kind == EventKind::LightSet) c.robots[e.robot].light = e.light;
        const bool last = k + 1 == t.events.size();
        if ((k + 1) % every != 0 && !last) continue;
        const std::vector<Point>* shown = targets && k >= leader_event ? &*targets : nullptr;
        frames.push_back(frame_svg(c, box, shown, k + 1, t.events.size(), to_string(e.time)));
    }
    return frames;
}

}  // namespace apf
