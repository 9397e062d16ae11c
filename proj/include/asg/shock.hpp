#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "asg/cost.hpp"
#include "asg/medial_axis.hpp"

namespace asg {

enum class ShockType { Type1 = 1, Type2 = 2, Type3 = 3, Type4 = 4 };

int toInt(ShockType t);
ShockType shockTypeFromInt(int v);

struct Seed {
    Pixel pos;
    int radius = 0;
    double cost = 0.0;
    ShockType type = ShockType::Type4;
};

/// Larger radius first, then lower cost, then row-major position.
bool seedBefore(const Seed& a, const Seed& b);

/// Seeds kept sorted by seedBefore; pop() returns the front.
class SeedQueue {
public:
    SeedQueue() = default;
    explicit SeedQueue(std::vector<Seed> seeds);

    bool empty() const { return head_ >= seeds_.size(); }
    std::size_t size() const { return seeds_.size() - head_; }
    const Seed& top() const { return seeds_[head_]; }
    Seed pop() { return seeds_[head_++]; }
    void push(const Seed& s);
    /// Removes every remaining seed matching pred; returns how many went.
    std::size_t removeIf(const std::function<bool(const Seed&)>& pred);
    /// Remaining seeds in pop order.
    std::vector<Seed> remaining() const { return {seeds_.begin() + static_cast<std::ptrdiff_t>(head_), seeds_.end()}; }

private:
    std::vector<Seed> seeds_;
    std::size_t head_ = 0;
};

struct ShockConfig {
    double deltaR = 0.0;
    int epsilonR = 1;

    void validate() const;
};

/// C(x,r) + deltaR < C(x, r + epsilonR), with an out-of-range or invalid larger
/// scale counting as +inf. False when (x,r) itself is invalid.
bool isScaleMaximal(const CostVolume& vol, Pixel x, int r, const ShockConfig& cfg);

/// Per pixel, the scale-maximal radius of lowest cost (0 when none) and its cost.
struct BestScaleMap {
    Raster<int> radius;
    Raster<double> cost;
};
BestScaleMap bestScales(const CostVolume& vol, const ShockConfig& cfg);

/// Shock type of a point with radius r given the radii of its axis neighbors
/// at distance 1 (empty vector = isolated). `disconnected` says whether those
/// neighbors fall into more than one 8-connected group once x is removed.
ShockType classifyShock(int r, const std::vector<int>& neighborRadii, bool disconnected);
/// Same, reading the neighbors from the axis.
ShockType classifyShock(const MedialAxis& axis, Pixel x, int r);

SeedQueue extractSeeds(const CostVolume& vol, const ShockConfig& cfg);

/// One line per seed: `x y r cost type`.
void writeSeeds(std::ostream& out, const std::vector<Seed>& seeds);
std::vector<Seed> readSeeds(std::istream& in);

}  // namespace asg
