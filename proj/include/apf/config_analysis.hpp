#pragma once

#include "apf/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace apf {

enum class Light : std::uint8_t {
    off,
    terminal,
    interior,
    failed,
    symmetry,
    ready,
    move,
    switch_off,
    leader,
    done,
};

inline constexpr std::array<Light, 10> kAllLights = {
    Light::off,   Light::terminal,   Light::interior, Light::failed, Light::symmetry,
    Light::ready, Light::move,       Light::switch_off, Light::leader, Light::done,
};

std::string_view to_string(Light l);
std::optional<Light> parse_light(std::string_view s);

struct Robot {
    Point center;
    Light light = Light::off;
    int chirality = 1;  // +1: local up is global up; -1: flipped
};

struct Configuration {
    std::vector<Robot> robots;

    std::size_t n() const { return robots.size(); }
    std::vector<Point> centers() const;
    std::vector<Disk> disks() const;
};

/// Throws std::invalid_argument when n < 3 or two centers are closer than 1.
void validate_configuration(const Configuration& c);

struct Batch {
    Scalar axis_x;
    std::vector<std::size_t> members;  // indices into the input, ascending y
};

std::vector<Batch> partition_batches(std::span<const Point> centers);

/// Lowest or highest member of its batch.
bool is_terminal(const Batch& b, std::size_t idx);

/// Sorted distances to a line; positions past `values.size()` hold the pad Φ.
struct LambdaString {
    std::vector<Scalar> values;
    std::size_t length = 0;

    /// Lexicographic, every number ranking below Φ. Returns -1, 0 or 1.
    friend int compare(const LambdaString& a, const LambdaString& b);
    friend bool operator==(const LambdaString& a, const LambdaString& b) { return compare(a, b) == 0; }
};

enum class Half { up, down, none };

std::string_view to_string(Half h);

struct LambdaPair {
    LambdaString up;
    LambdaString down;
};

LambdaPair lambda_strings(std::span<const Scalar> member_ys, const Scalar& line_y);
Half dominant_half(std::span<const Scalar> member_ys, const Scalar& line_y);

struct SymmetryVerdict {
    enum class Kind { asymmetric, symmetric_with_center, symmetric_no_center };
    Kind kind = Kind::symmetric_no_center;
    Half dominant = Half::none;      // set when asymmetric
    std::size_t center_index = 0;    // position in member_ys, set when symmetric_with_center
};

SymmetryVerdict batch_symmetry_verdict(std::span<const Scalar> member_ys, const Scalar& line_y);

/// Batch overloads read member ordinates out of `centers`.
LambdaPair lambda_strings(std::span<const Point> centers, const Batch& b, const Scalar& line_y);
Half dominant_half(std::span<const Point> centers, const Batch& b, const Scalar& line_y);
SymmetryVerdict batch_symmetry_verdict(std::span<const Point> centers, const Batch& b, const Scalar& line_y);

/// Horizontal axis about which the centers are mirror symmetric with no
/// center on it, if any. Only y = (y_min + y_max) / 2 can qualify.
std::optional<Scalar> unsolvable_axis(std::span<const Point> centers);
bool unsolvable_initial(const Configuration& c);

bool is_leader_configuration(const Configuration& c);

}  // namespace apf
