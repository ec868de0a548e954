#include "apf/geometry.hpp"

#include <cctype>
#include <stdexcept>

namespace apf {

Point operator+(const Point& a, const Point& b) { return {Scalar(a.x + b.x), Scalar(a.y + b.y)}; }
Point operator-(const Point& a, const Point& b) { return {Scalar(a.x - b.x), Scalar(a.y - b.y)}; }
Point operator*(const Scalar& s, const Point& p) { return {Scalar(s * p.x), Scalar(s * p.y)}; }

Scalar dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }
Scalar cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }
Scalar squared_norm(const Point& p) { return dot(p, p); }
Scalar squared_distance(const Point& a, const Point& b) { return squared_norm(a - b); }

Scalar squared_distance_to_segment(const Point& p, const Point& a, const Point& b)
{
    const Point ab = b - a;
    const Scalar len2 = squared_norm(ab);
    if (sgn(len2) == 0) return squared_distance(p, a);
    const Point ap = p - a;
    const Scalar t = dot(ap, ab);
    if (sgn(t) <= 0) return squared_norm(ap);
    if (t >= len2) return squared_distance(p, b);
    // |ap|^2 - (ap.ab)^2 / |ab|^2
    return squared_norm(ap) - t * t / len2;
}

bool disk_blocks_segment(const Disk& d, const Segment& s)
{
    static const Scalar quarter(1, 4);
    return squared_distance_to_segment(d.center, s.a, s.b) <= quarter;
}

bool segment_clear(const Point& a, const Point& b, std::span<const Disk> blockers)
{
    for (const Disk& d : blockers) {
        if (disk_blocks_segment(d, {a, b})) return false;
    }
    return true;
}

std::string to_string(const Scalar& s)
{
    mpq_class c(s);
    c.canonicalize();
    return c.get_str();
}

Point canonical(Point p)
{
    p.x.canonicalize();
    p.y.canonicalize();
    return p;
}

Scalar frac(long p, long q)
{
    Scalar s(p, q);
    s.canonicalize();
    return s;
}

double to_double(const Scalar& s) { return s.get_d(); }

Scalar parse_scalar(const std::string& text)
{
    std::string t;
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
    }
    if (t.empty()) throw std::invalid_argument("empty number");
    const auto dot_pos = t.find('.');
    if (dot_pos != std::string::npos) {
        // Exact decimal: "-12.375" -> -12375/1000
        std::string digits = t.substr(0, dot_pos) + t.substr(dot_pos + 1);
        const std::size_t frac_len = t.size() - dot_pos - 1;
        if (digits.empty() || digits == "-" || digits == "+") throw std::invalid_argument("bad number: " + text);
        mpz_class num;
        if (num.set_str(digits[0] == '+' ? digits.substr(1) : digits, 10) != 0) {
            throw std::invalid_argument("bad number: " + text);
        }
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        Scalar q(num, den);
        q.canonicalize();
        return q;
    }
    if (t[0] == '+') t.erase(0, 1);
    Scalar q;
    if (q.set_str(t, 10) != 0) throw std::invalid_argument("bad number: " + text);
    if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator: " + text);
    q.canonicalize();
    return q;
}

}  // namespace apf
