#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace apf {

// Exact rational number. One unit of length is one robot diameter.
using Scalar = mpq_class;

struct Point {
    Scalar x;
    Scalar y;

    Point() = default;
    Point(Scalar x_, Scalar y_) : x(std::move(x_)), y(std::move(y_)) {}

    friend bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
    // Lexicographic (x, then y); used for canonical ordering of multisets.
    friend bool operator<(const Point& a, const Point& b)
    {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    }
};

Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);
Point operator*(const Scalar& s, const Point& p);

Scalar dot(const Point& a, const Point& b);
Scalar cross(const Point& a, const Point& b);
Scalar squared_norm(const Point& p);
Scalar squared_distance(const Point& a, const Point& b);

/// Exact squared distance from `p` to the closed segment [a, b].
Scalar squared_distance_to_segment(const Point& p, const Point& a, const Point& b);

inline const Scalar& robot_radius()
{
    static const Scalar r(1, 2);
    return r;
}

struct Disk {
    Point center;  // radius is always 1/2
};

struct Segment {
    Point a;
    Point b;
};

/// True iff the closed disk meets the closed segment. Tangency blocks.
bool disk_blocks_segment(const Disk& d, const Segment& s);

/// True iff the segment [a, b] stays strictly clear of every disk in `blockers`.
bool segment_clear(const Point& a, const Point& b, std::span<const Disk> blockers);

/// Visibility of a point from a robot under the opaque closed-disk model.
///
/// `target` is visible to robot `observer` iff some point x on the observer's
/// boundary sees `target` along a segment that touches no other robot disk.
/// Disks that contain `target` belong to the robot being looked at and are
/// not treated as blockers.
///
/// Decision procedure. The set of witnessing segments is open (blockers are
/// compact and tangency counts as blocking), so a witness exists iff one exists
/// on a line lying arbitrarily close to a critical line of the pencil through
/// `target`: a line tangent to a relevant disk or passing through a contact
/// point of two disks. Each critical line is rotated slightly both ways about
/// `target`; a candidate that clears all blockers in floating point is then
/// re-checked in exact rational arithmetic, so every `true` answer carries an
/// exact certificate. A `false` answer means no critical neighbourhood holds a
/// witness, which by the openness argument means none exists.
bool can_see(std::span<const Disk> all_disks, std::size_t observer, const Point& target);

/// Robot-to-robot visibility: some boundary point of `j` is visible to `i`.
///
/// Same construction as `can_see` with the pencil replaced by the
/// two-parameter family of lines meeting both disks. Critical lines are the
/// common tangents of every pair of relevant disks (and contact points);
/// the four sectors around each one are probed. Tangent robots always see each
/// other. A blocker centred on the segment joining the two centres blocks
/// everything (the hull of the two disks is exactly one unit wide).
bool robot_sees_robot(std::span<const Disk> all_disks, std::size_t i, std::size_t j);

/// Parameters z -> scale_rot * z + offset (or applied to conj(z) when reflected),
/// with points read as complex numbers.
struct SimilarityWitness {
    Scalar rot_re;
    Scalar rot_im;
    Point offset;
    bool reflected = false;

    Point apply(const Point& p) const;
};

/// Whether `points` equals `pattern` up to translation, rotation, reflection
/// and positive uniform scaling, as multisets. Throws std::invalid_argument
/// ("degenerate point set") when all points of either set coincide.
std::optional<SimilarityWitness> find_similarity(std::span<const Point> points,
                                                 std::span<const Point> pattern);

bool similar_up_to_similarity(std::span<const Point> points, std::span<const Point> pattern);

std::string to_string(const Scalar& s);
/// Reduced form; mpq_class(p, q) does not reduce and equality needs it.
Point canonical(Point p);
Scalar frac(long p, long q);
Scalar parse_scalar(const std::string& text);
double to_double(const Scalar& s);

}  // namespace apf
