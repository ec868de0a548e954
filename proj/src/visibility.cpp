#include "apf/geometry.hpp"
#include "apf/visibility.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace apf {
namespace {

struct V2 {
    double x = 0;
    double y = 0;
};

V2 operator+(V2 a, V2 b) { return {a.x + b.x, a.y + b.y}; }
V2 operator-(V2 a, V2 b) { return {a.x - b.x, a.y - b.y}; }
V2 operator*(double s, V2 a) { return {s * a.x, s * a.y}; }
double dotd(V2 a, V2 b) { return a.x * b.x + a.y * b.y; }
double norm2(V2 a) { return dotd(a, a); }
V2 rotate(V2 v, double ang)
{
    const double c = std::cos(ang), s = std::sin(ang);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

V2 approx(const Point& p) { return {p.x.get_d(), p.y.get_d()}; }

double seg_dist2(V2 p, V2 a, V2 b)
{
    const V2 ab = b - a;
    const double len2 = norm2(ab);
    const V2 ap = p - a;
    if (len2 <= 0) return norm2(ap);
    double t = dotd(ap, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return norm2(p - (a + t * ab));
}

// Circle with radius 1/2 (robot) or 0 (a point such as a contact point).
struct Circ {
    V2 c;
    double r;
};

// Oriented line {x : n.x = c}, |n| = 1.
struct Line {
    V2 n;
    double c;
};

Line rotate_about(const Line& l, V2 pivot, double ang)
{
    const V2 n = rotate(l.n, ang);
    return {n, dotd(n, pivot)};
}

V2 project(const Line& l, V2 p) { return p - (dotd(l.n, p) - l.c) * l.n; }

struct Tangent {
    Line line;
    V2 pivot_a;
    V2 pivot_b;
};

// Up to four common tangent lines of two circles.
template <class F>
void common_tangents(const Circ& a, const Circ& b, F&& emit)
{
    const V2 d = b.c - a.c;
    const double dist = std::sqrt(norm2(d));
    if (dist < 1e-14) return;
    const V2 e = (1.0 / dist) * d;
    const V2 ep{-e.y, e.x};
    for (int sb : {1, -1}) {
        const double k = sb * b.r - a.r;
        if (std::abs(k) > dist * (1 + 1e-12)) continue;
        const double cosv = std::clamp(k / dist, -1.0, 1.0);
        const double h = std::sqrt(std::max(0.0, 1 - cosv * cosv));
        for (int hs : {1, -1}) {
            const V2 n = cosv * e + (hs * h) * ep;
            const double c = dotd(n, a.c) - a.r;
            emit(Tangent{{n, c}, a.c - a.r * n, b.c - (sb * b.r) * n});
            if (h == 0) break;
        }
    }
}

constexpr std::array<double, 2> kScales{1e-3, 1e-6};

class WitnessSearch {
public:
    WitnessSearch(std::span<const Disk> blockers) : exact_(blockers)
    {
        approx_.reserve(blockers.size());
        for (const Disk& d : blockers) approx_.push_back(approx(d.center));
    }

    // Floating-point screen followed by exact confirmation.
    bool try_segment(V2 x, V2 y, const Point& o, const Point& t)
    {
        static const Scalar quarter(1, 4);
        // Small safety margin so that the exact check is rarely wasted.
        constexpr double thresh = (0.5 + 1e-11) * (0.5 + 1e-11);
        for (std::size_t k = 0; k < approx_.size(); ++k) {
            const std::size_t idx = (k + hint_) % approx_.size();
            if (seg_dist2(approx_[idx], x, y) <= thresh) {
                hint_ = idx;
                return false;
            }
        }
        const Point xe{Scalar(x.x), Scalar(x.y)};
        const Point ye{Scalar(y.x), Scalar(y.y)};
        if (squared_distance(xe, o) > quarter || squared_distance(ye, t) > quarter) return false;
        return segment_clear(xe, ye, exact_);
    }

    const std::vector<V2>& centers() const { return approx_; }

private:
    std::span<const Disk> exact_;
    std::vector<V2> approx_;
    std::size_t hint_ = 0;
};

}  // namespace

bool can_see(std::span<const Disk> all_disks, std::size_t observer, const Point& target)
{
    static const Scalar quarter(1, 4);
    const Point& o = all_disks[observer].center;
    std::vector<Disk> blockers;
    for (std::size_t k = 0; k < all_disks.size(); ++k) {
        if (k == observer) continue;
        // A disk containing the target is the target's own body.
        if (squared_distance(all_disks[k].center, target) <= quarter) continue;
        blockers.push_back(all_disks[k]);
    }
    if (squared_distance(o, target) <= quarter) return true;

    const V2 od = approx(o);
    const V2 pd = approx(target);
    // Only disks meeting the hull of the observer disk and the target matter.
    std::vector<Disk> relevant;
    for (const Disk& b : blockers) {
        if (seg_dist2(approx(b.center), od, pd) <= 1.0 + 1e-9) relevant.push_back(b);
    }
    WitnessSearch search(relevant);
    // Exact target point: the candidate segment ends exactly at `target`.
    auto try_line = [&](const Line& l) {
        const double dist_o = dotd(l.n, od) - l.c;
        if (std::abs(dist_o) >= 0.5 - 1e-12) return false;
        const V2 x = od - dist_o * l.n;
        const Point xe{Scalar(x.x), Scalar(x.y)};
        if (squared_distance(xe, o) > quarter) return false;
        constexpr double thresh = (0.5 + 1e-11) * (0.5 + 1e-11);
        for (const V2& c : search.centers()) {
            if (seg_dist2(c, x, pd) <= thresh) return false;
        }
        return segment_clear(xe, target, relevant);
    };

    const V2 dir = od - pd;
    const double len = std::sqrt(norm2(dir));
    const V2 u = (1.0 / len) * dir;
    const V2 nperp{-u.y, u.x};
    for (double s : {0.0, 0.25, -0.25, 0.45, -0.45}) {
        const V2 xo = od + s * nperp;
        const V2 d = xo - pd;
        const double dl = std::sqrt(norm2(d));
        const V2 n{-d.y / dl, d.x / dl};
        if (try_line({n, dotd(n, pd)})) return true;
    }

    std::vector<Circ> critical;
    critical.push_back({od, 0.5});
    for (const Disk& b : relevant) {
        critical.push_back({approx(b.center), 0.5});
        if (squared_distance(b.center, o) == 1) {
            critical.push_back({approx(Scalar(1, 2) * (b.center + o)), 0.0});
        }
    }
    const Circ pc{pd, 0.0};
    bool found = false;
    for (const Circ& c : critical) {
        common_tangents(pc, c, [&](const Tangent& t) {
            if (found) return;
            for (double eps : kScales) {
                for (double sgn_eps : {1.0, -1.0}) {
                    if (try_line(rotate_about(t.line, pd, sgn_eps * eps))) {
                        found = true;
                        return;
                    }
                }
            }
        });
        if (found) return true;
    }
    return false;
}

namespace {

bool blocker_on_center_segment(const Point& o, const Point& t, const Point& b)
{
    const Point ot = t - o;
    const Point ob = b - o;
    if (sgn(cross(ot, ob)) != 0) return false;
    const Scalar along = dot(ob, ot);
    return sgn(along) > 0 && along < squared_norm(ot);
}

bool sees_among(const Point& o, const Point& t, std::span<const Disk> relevant)
{
    static const Scalar quarter(1, 4);
    for (const Disk& b : relevant) {
        if (blocker_on_center_segment(o, t, b.center)) return false;
    }
    if (relevant.empty()) return true;

    const V2 od = approx(o);
    const V2 td = approx(t);
    WitnessSearch search(relevant);
    auto try_line = [&](const Line& l) {
        const double dist_o = dotd(l.n, od) - l.c;
        const double dist_t = dotd(l.n, td) - l.c;
        if (std::abs(dist_o) >= 0.5 - 1e-12 || std::abs(dist_t) >= 0.5 - 1e-12) return false;
        return search.try_segment(od - dist_o * l.n, td - dist_t * l.n, o, t);
    };

    const V2 d = td - od;
    const double len = std::sqrt(norm2(d));
    const V2 u = (1.0 / len) * d;
    const V2 nperp{-u.y, u.x};
    for (double s : {0.0, 0.25, -0.25, 0.45, -0.45}) {
        if (try_line({nperp, dotd(nperp, od) + s})) return true;
    }

    std::vector<Circ> critical;
    critical.push_back({od, 0.5});
    critical.push_back({td, 0.5});
    for (const Disk& b : relevant) {
        critical.push_back({approx(b.center), 0.5});
        if (squared_distance(b.center, o) == 1) {
            critical.push_back({approx(Scalar(1, 2) * (b.center + o)), 0.0});
        }
        if (squared_distance(b.center, t) == 1) {
            critical.push_back({approx(Scalar(1, 2) * (b.center + t)), 0.0});
        }
    }

    bool found = false;
    auto probe = [&](const Tangent& tg) {
        if (found) return;
        const bool same_pivot = norm2(tg.pivot_a - tg.pivot_b) < 1e-20;
        for (double eps : kScales) {
            // Directions in line space: rotation about either tangency point keeps
            // that tangency to first order, so the four sign combinations land in
            // the four sectors around the critical line.
            for (double sa : {1.0, -1.0, 0.0}) {
                for (double sb : {1.0, -1.0, 0.0}) {
                    if (sa == 0 && sb == 0) continue;
                    Line l = rotate_about(tg.line, tg.pivot_a, sa * eps);
                    if (sb != 0) {
                        if (same_pivot) {
                            l.c += sb * eps;
                        } else {
                            l = rotate_about(l, project(l, tg.pivot_b), sb * eps);
                        }
                    }
                    if (try_line(l)) {
                        found = true;
                        return;
                    }
                }
            }
            for (double st : {1.0, -1.0}) {
                Line l = tg.line;
                l.c += st * eps;
                if (try_line(l)) {
                    found = true;
                    return;
                }
            }
        }
    };
    for (std::size_t a = 0; a < critical.size() && !found; ++a) {
        for (std::size_t b = a + 1; b < critical.size() && !found; ++b) {
            common_tangents(critical[a], critical[b], probe);
        }
    }
    return found;
}

std::vector<Disk> relevant_blockers(std::span<const Disk> all_disks, std::size_t i, std::size_t j)
{
    const V2 od = approx(all_disks[i].center);
    const V2 td = approx(all_disks[j].center);
    std::vector<Disk> relevant;
    for (std::size_t k = 0; k < all_disks.size(); ++k) {
        if (k == i || k == j) continue;
        if (seg_dist2(approx(all_disks[k].center), od, td) <= 1.0 + 1e-9) relevant.push_back(all_disks[k]);
    }
    return relevant;
}

}  // namespace

bool robot_sees_robot(std::span<const Disk> all_disks, std::size_t i, std::size_t j)
{
    const Point& o = all_disks[i].center;
    const Point& t = all_disks[j].center;
    if (squared_distance(o, t) <= 1) return true;
    const std::vector<Disk> relevant = relevant_blockers(all_disks, i, j);
    return sees_among(o, t, relevant);
}

bool VisibilityCache::sees(std::span<const Disk> all_disks, std::size_t i, std::size_t j)
{
    const Point& o = all_disks[i].center;
    const Point& t = all_disks[j].center;
    if (squared_distance(o, t) <= 1) return true;
    std::vector<Disk> relevant = relevant_blockers(all_disks, i, j);
    // Translation-invariant key: everything relative to the observer, blockers sorted.
    std::vector<Point> rel;
    rel.reserve(relevant.size());
    for (const Disk& d : relevant) rel.push_back(d.center - o);
    std::sort(rel.begin(), rel.end());
    std::string key = to_string(t.x - o.x) + ',' + to_string(t.y - o.y);
    for (const Point& p : rel) {
        key += ';';
        key += to_string(p.x);
        key += ',';
        key += to_string(p.y);
    }
    if (auto it = memo_.find(key); it != memo_.end()) {
        ++hits_;
        return it->second;
    }
    ++misses_;
    const bool result = sees_among(o, t, relevant);
    if (memo_.size() > kMaxEntries) memo_.clear();
    memo_.emplace(std::move(key), result);
    return result;
}

std::vector<std::vector<bool>> VisibilityCache::matrix(std::span<const Disk> all_disks)
{
    const std::size_t n = all_disks.size();
    std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool v = sees(all_disks, i, j);
            m[i][j] = m[j][i] = v;
        }
    }
    return m;
}

}  // namespace apf
