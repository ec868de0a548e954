#include "apf/config_analysis.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace apf {

namespace {

constexpr std::array<std::string_view, 10> kLightNames = {
    "off", "terminal", "interior", "failed", "symmetry", "ready", "move", "switch_off", "leader", "done",
};

Scalar abs_of(const Scalar& s) { return sgn(s) < 0 ? Scalar(-s) : s; }

std::vector<Scalar> member_ys(std::span<const Point> centers, const Batch& b)
{
    std::vector<Scalar> ys;
    ys.reserve(b.members.size());
    for (std::size_t m : b.members) ys.push_back(centers[m].y);
    return ys;
}

}  // namespace

std::string_view to_string(Light l) { return kLightNames[static_cast<std::size_t>(l)]; }

std::optional<Light> parse_light(std::string_view s)
{
    for (std::size_t i = 0; i < kLightNames.size(); ++i) {
        if (kLightNames[i] == s) return static_cast<Light>(i);
    }
    return std::nullopt;
}

std::string_view to_string(Half h)
{
    switch (h) {
    case Half::up: return "up";
    case Half::down: return "down";
    case Half::none: break;
    }
    return "none";
}

std::vector<Point> Configuration::centers() const
{
    std::vector<Point> out;
    out.reserve(robots.size());
    for (const Robot& r : robots) out.push_back(r.center);
    return out;
}

std::vector<Disk> Configuration::disks() const
{
    std::vector<Disk> out;
    out.reserve(robots.size());
    for (const Robot& r : robots) out.push_back({r.center});
    return out;
}

void validate_configuration(const Configuration& c)
{
    if (c.n() < 3) throw std::invalid_argument("n >= 3 required");
    for (std::size_t i = 0; i < c.n(); ++i) {
        if (c.robots[i].chirality != 1 && c.robots[i].chirality != -1) {
            throw std::invalid_argument("chirality must be 1 or -1");
        }
        for (std::size_t j = i + 1; j < c.n(); ++j) {
            if (squared_distance(c.robots[i].center, c.robots[j].center) < 1) {
                throw std::invalid_argument("robots " + std::to_string(i) + " and " + std::to_string(j) +
                                            " overlap");
            }
        }
    }
}

std::vector<Batch> partition_batches(std::span<const Point> centers)
{
    std::map<Scalar, std::vector<std::size_t>> by_x;
    for (std::size_t i = 0; i < centers.size(); ++i) by_x[centers[i].x].push_back(i);
    std::vector<Batch> out;
    out.reserve(by_x.size());
    for (auto& [x, idx] : by_x) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return centers[a].y < centers[b].y; });
        out.push_back({x, std::move(idx)});
    }
    return out;
}

bool is_terminal(const Batch& b, std::size_t idx)
{
    return !b.members.empty() && (b.members.front() == idx || b.members.back() == idx);
}

int compare(const LambdaString& a, const LambdaString& b)
{
    const std::size_t len = std::max(a.length, b.length);
    for (std::size_t k = 0; k < len; ++k) {
        const bool a_pad = k >= a.values.size();
        const bool b_pad = k >= b.values.size();
        if (a_pad && b_pad) continue;
        if (a_pad) return 1;
        if (b_pad) return -1;
        if (a.values[k] < b.values[k]) return -1;
        if (b.values[k] < a.values[k]) return 1;
    }
    return 0;
}

LambdaPair lambda_strings(std::span<const Scalar> ys, const Scalar& line_y)
{
    LambdaPair p;
    for (const Scalar& y : ys) {
        const int s = sgn(y - line_y);
        if (s >= 0) p.up.values.push_back(y - line_y);
        if (s <= 0) p.down.values.push_back(line_y - y);
    }
    std::sort(p.up.values.begin(), p.up.values.end());
    std::sort(p.down.values.begin(), p.down.values.end());
    const std::size_t len = std::max(p.up.values.size(), p.down.values.size());
    p.up.length = p.down.length = len;
    return p;
}

Half dominant_half(std::span<const Scalar> ys, const Scalar& line_y)
{
    const LambdaPair p = lambda_strings(ys, line_y);
    const int c = compare(p.up, p.down);
    if (c < 0) return Half::up;
    if (c > 0) return Half::down;
    return Half::none;
}

SymmetryVerdict batch_symmetry_verdict(std::span<const Scalar> ys, const Scalar& line_y)
{
    SymmetryVerdict v;
    v.dominant = dominant_half(ys, line_y);
    if (v.dominant != Half::none) {
        v.kind = SymmetryVerdict::Kind::asymmetric;
        return v;
    }
    for (std::size_t k = 0; k < ys.size(); ++k) {
        if (ys[k] == line_y) {
            v.kind = SymmetryVerdict::Kind::symmetric_with_center;
            v.center_index = k;
            return v;
        }
    }
    v.kind = SymmetryVerdict::Kind::symmetric_no_center;
    return v;
}

LambdaPair lambda_strings(std::span<const Point> centers, const Batch& b, const Scalar& line_y)
{
    const auto ys = member_ys(centers, b);
    return lambda_strings(std::span<const Scalar>(ys), line_y);
}

Half dominant_half(std::span<const Point> centers, const Batch& b, const Scalar& line_y)
{
    const auto ys = member_ys(centers, b);
    return dominant_half(std::span<const Scalar>(ys), line_y);
}

SymmetryVerdict batch_symmetry_verdict(std::span<const Point> centers, const Batch& b, const Scalar& line_y)
{
    const auto ys = member_ys(centers, b);
    SymmetryVerdict v = batch_symmetry_verdict(std::span<const Scalar>(ys), line_y);
    if (v.kind == SymmetryVerdict::Kind::symmetric_with_center) v.center_index = b.members[v.center_index];
    return v;
}

std::optional<Scalar> unsolvable_axis(std::span<const Point> centers)
{
    if (centers.empty()) return std::nullopt;
    Scalar lo = centers[0].y, hi = centers[0].y;
    for (const Point& p : centers) {
        lo = std::min(lo, p.y);
        hi = std::max(hi, p.y);
    }
    const Scalar axis = (lo + hi) / 2;
    std::vector<Point> a(centers.begin(), centers.end());
    std::vector<Point> mirrored;
    mirrored.reserve(a.size());
    for (const Point& p : a) {
        if (p.y == axis) return std::nullopt;
        mirrored.push_back({p.x, Scalar(2 * axis - p.y)});
    }
    std::sort(a.begin(), a.end());
    std::sort(mirrored.begin(), mirrored.end());
    if (a != mirrored) return std::nullopt;
    return axis;
}

bool unsolvable_initial(const Configuration& c)
{
    const auto centers = c.centers();
    return unsolvable_axis(centers).has_value();
}

bool is_leader_configuration(const Configuration& c)
{
    std::optional<std::size_t> leader;
    for (std::size_t i = 0; i < c.n(); ++i) {
        if (c.robots[i].light == Light::leader) {
            if (leader) return false;
            leader = i;
        }
    }
    if (!leader) return false;
    const Point& lp = c.robots[*leader].center;
    int side = 0;
    for (std::size_t i = 0; i < c.n(); ++i) {
        if (i == *leader) continue;
        const Robot& r = c.robots[i];
        if (r.light != Light::off) return false;
        if (r.center.x <= lp.x) return false;
        const Scalar dy = r.center.y - lp.y;
        const int s = sgn(dy);
        if (s == 0) return false;
        if (side != 0 && s != side) return false;
        side = s;
        if (abs_of(dy) < 2) return false;
    }
    return true;
}

}  // namespace apf
