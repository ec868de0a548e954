#include "apf/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace apf {
namespace {

// Complex helpers on Points.
Point cmul(const Point& a, const Point& b) { return {a.x * b.x - a.y * b.y, a.x * b.y + a.y * b.x}; }

Point cdiv(const Point& a, const Point& b)
{
    const Scalar den = squared_norm(b);
    return {(a.x * b.x + a.y * b.y) / den, (a.y * b.x - a.x * b.y) / den};
}

Point conj(const Point& p) { return {p.x, -p.y}; }

bool all_coincident(std::span<const Point> pts)
{
    return std::all_of(pts.begin(), pts.end(), [&](const Point& p) { return p == pts.front(); });
}

}  // namespace

Point SimilarityWitness::apply(const Point& p) const
{
    const Point z = reflected ? conj(p) : p;
    return cmul({rot_re, rot_im}, z) + offset;
}

std::optional<SimilarityWitness> find_similarity(std::span<const Point> points_in, std::span<const Point> pattern_in)
{
    std::vector<Point> points, pattern;
    for (const Point& p : points_in) points.push_back(canonical(p));
    for (const Point& p : pattern_in) pattern.push_back(canonical(p));
    if (points.size() != pattern.size()) return std::nullopt;
    if (points.empty() || all_coincident(points) || all_coincident(pattern)) {
        throw std::invalid_argument("degenerate point set");
    }

    // Anchor: a farthest-apart pair of the pattern.
    std::size_t ia = 0, ib = 1;
    Scalar best = -1;
    for (std::size_t a = 0; a < pattern.size(); ++a) {
        for (std::size_t b = a + 1; b < pattern.size(); ++b) {
            const Scalar d = squared_distance(pattern[a], pattern[b]);
            if (d > best) {
                best = d;
                ia = a;
                ib = b;
            }
        }
    }

    std::vector<Point> target(points.begin(), points.end());
    std::sort(target.begin(), target.end());

    std::vector<Point> mapped(pattern.size());
    for (std::size_t qa = 0; qa < points.size(); ++qa) {
        for (std::size_t qb = 0; qb < points.size(); ++qb) {
            if (qa == qb) continue;
            const Point dq = points[qb] - points[qa];
            // Image of the anchor pair must realise the largest distance too.
            bool ok_len = true;
            for (std::size_t k = 0; k < points.size() && ok_len; ++k) {
                if (squared_distance(points[qa], points[k]) > squared_norm(dq)) ok_len = false;
            }
            if (!ok_len) continue;
            for (bool reflected : {false, true}) {
                const Point pa = reflected ? conj(pattern[ia]) : pattern[ia];
                const Point pb = reflected ? conj(pattern[ib]) : pattern[ib];
                SimilarityWitness w;
                const Point rot = cdiv(dq, pb - pa);
                w.rot_re = rot.x;
                w.rot_im = rot.y;
                w.reflected = reflected;
                w.offset = points[qa] - cmul(rot, pa);
                for (std::size_t k = 0; k < pattern.size(); ++k) mapped[k] = w.apply(pattern[k]);
                std::sort(mapped.begin(), mapped.end());
                if (mapped == target) return w;
            }
        }
    }
    return std::nullopt;
}

bool similar_up_to_similarity(std::span<const Point> points, std::span<const Point> pattern)
{
    return find_similarity(points, pattern).has_value();
}

}  // namespace apf
