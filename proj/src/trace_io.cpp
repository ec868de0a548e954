#include "apf/simulator.hpp"

#include <json.hpp>

#include <sstream>

namespace apf {

namespace {

using nlohmann::json;

json point_json(const Point& p) { return json{{"x", to_string(p.x)}, {"y", to_string(p.y)}}; }

Point point_from(const json& j) { return {parse_scalar(j.at("x").get<std::string>()), parse_scalar(j.at("y").get<std::string>())}; }

Light light_from(const json& j)
{
    const auto s = j.get<std::string>();
    const auto l = parse_light(s);
    if (!l) throw std::invalid_argument("unknown light: " + s);
    return *l;
}

json header_json(const Trace& t)
{
    json robots = json::array();
    for (const Robot& r : t.initial.robots) {
        json rj = point_json(r.center);
        rj["light"] = std::string(to_string(r.light));
        rj["chirality"] = r.chirality;
        robots.push_back(rj);
    }
    json pattern = json::array();
    for (const Point& p : t.pattern.targets) pattern.push_back(point_json(p));
    return json{
        {"mode", std::string(to_string(t.params.mode))},
        {"delta", to_string(t.params.delta)},
        {"seed", t.params.seed},
        {"max_events", t.params.max_events},
        {"monitors", t.params.monitors},
        {"fairness_window", t.params.fairness_window},
        {"ssync_all", t.params.ssync_all},
        {"robots", robots},
        {"pattern", pattern},
    };
}

json event_json(const TraceEvent& e)
{
    json payload{{"pos", point_json(e.position)}, {"light", std::string(to_string(e.light))}};
    switch (e.kind) {
    case EventKind::LookDone:
        payload["seen"] = e.seen;
        payload["branch"] = e.branch;
        break;
    case EventKind::ComputeDone: {
        payload["branch"] = e.branch;
        payload["from"] = std::string(to_string(e.previous_light));
        json w = json::array();
        for (const Point& p : e.waypoints) w.push_back(point_json(p));
        payload["waypoints"] = w;
        break;
    }
    case EventKind::LightSet: payload["from"] = std::string(to_string(e.previous_light)); break;
    default: break;
    }
    return json{{"t", to_string(e.time)}, {"robot", e.robot}, {"kind", std::string(to_string(e.kind))}, {"payload", payload}};
}

TraceEvent event_from(const json& j)
{
    TraceEvent e;
    e.time = parse_scalar(j.at("t").get<std::string>());
    e.robot = j.at("robot").get<std::size_t>();
    const auto kind = parse_event_kind(j.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("unknown event kind");
    e.kind = *kind;
    const json& p = j.at("payload");
    e.position = point_from(p.at("pos"));
    e.light = light_from(p.at("light"));
    if (p.contains("from")) e.previous_light = light_from(p.at("from"));
    if (p.contains("branch")) e.branch = p.at("branch").get<std::string>();
    if (p.contains("seen")) e.seen = p.at("seen").get<std::vector<std::size_t>>();
    if (p.contains("waypoints")) {
        for (const json& w : p.at("waypoints")) e.waypoints.push_back(point_from(w));
    }
    return e;
}

}  // namespace

std::string serialize_trace(const Trace& t)
{
    std::string out = header_json(t).dump();
    out.push_back('\n');
    for (const TraceEvent& e : t.events) {
        out += event_json(e).dump();
        out.push_back('\n');
    }
    return out;
}

Trace parse_trace(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    Trace t;
    bool header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            if (!header) {
                const auto mode = parse_mode(j.at("mode").get<std::string>());
                if (!mode) throw std::invalid_argument("unknown mode");
                t.params.mode = *mode;
                t.params.delta = parse_scalar(j.at("delta").get<std::string>());
                t.params.seed = j.at("seed").get<std::uint64_t>();
                t.params.max_events = j.at("max_events").get<std::uint64_t>();
                t.params.monitors = j.at("monitors").get<std::vector<std::string>>();
                t.params.fairness_window = j.value("fairness_window", std::uint64_t{0});
                t.params.ssync_all = j.value("ssync_all", false);
                for (const json& r : j.at("robots")) {
                    t.initial.robots.push_back({point_from(r), light_from(r.at("light")), r.at("chirality").get<int>()});
                }
                for (const json& p : j.at("pattern")) t.pattern.targets.push_back(point_from(p));
                header = true;
                continue;
            }
            if (j.contains("footer")) continue;
            t.events.push_back(event_from(j));
            if (t.events.back().robot >= t.initial.n()) throw std::invalid_argument("robot index out of range");
        } catch (const json::exception& e) {
            throw std::invalid_argument("trace line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("trace line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header) throw std::invalid_argument("trace has no header line");
    return t;
}

}  // namespace apf
