#pragma once

#include "apf/geometry.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace apf {

/// Memoised robot_sees_robot. The key is the exact geometry of the pair and of
/// every disk that can touch their hull, expressed relative to the observer, so
/// unchanged neighbourhoods are never recomputed as other robots move.
class VisibilityCache {
public:
    bool sees(std::span<const Disk> all_disks, std::size_t i, std::size_t j);

    /// Symmetric visibility matrix of a whole configuration.
    std::vector<std::vector<bool>> matrix(std::span<const Disk> all_disks);

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    static constexpr std::size_t kMaxEntries = 200000;
    std::unordered_map<std::string, bool> memo_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

}  // namespace apf
