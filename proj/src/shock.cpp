#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "asg/shock.hpp"

namespace asg {

int toInt(ShockType t) { return static_cast<int>(t); }

ShockType shockTypeFromInt(int v) {
    if (v < 1 || v > 4) throw std::invalid_argument("shock type must be 1..4");
    return static_cast<ShockType>(v);
}

bool seedBefore(const Seed& a, const Seed& b) {
    if (a.radius != b.radius) return a.radius > b.radius;
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.pos.y != b.pos.y) return a.pos.y < b.pos.y;
    return a.pos.x < b.pos.x;
}

SeedQueue::SeedQueue(std::vector<Seed> seeds) : seeds_(std::move(seeds)) {
    std::stable_sort(seeds_.begin(), seeds_.end(), seedBefore);
}

void SeedQueue::push(const Seed& s) {
    auto it = std::upper_bound(seeds_.begin() + static_cast<std::ptrdiff_t>(head_), seeds_.end(), s, seedBefore);
    seeds_.insert(it, s);
}

std::size_t SeedQueue::removeIf(const std::function<bool(const Seed&)>& pred) {
    auto first = seeds_.begin() + static_cast<std::ptrdiff_t>(head_);
    auto it = std::remove_if(first, seeds_.end(), pred);
    const auto n = static_cast<std::size_t>(seeds_.end() - it);
    seeds_.erase(it, seeds_.end());
    return n;
}

void ShockConfig::validate() const {
    if (epsilonR < 1) throw std::invalid_argument("epsilon_r must be >= 1");
    if (!(deltaR >= 0.0) || !std::isfinite(deltaR)) throw std::invalid_argument("delta_r must be >= 0");
}

bool isScaleMaximal(const CostVolume& vol, Pixel x, int r, const ShockConfig& cfg) {
    const double c = vol.cost(x, r);
    if (c == kInvalidCost) return false;
    const double larger = vol.cost(x, r + cfg.epsilonR);
    return c + cfg.deltaR < larger;
}

BestScaleMap bestScales(const CostVolume& vol, const ShockConfig& cfg) {
    BestScaleMap m{Raster<int>(vol.width(), vol.height(), 0),
                   Raster<double>(vol.width(), vol.height(), kInvalidCost)};
    for (int y = 0; y < vol.height(); ++y) {
        for (int x = 0; x < vol.width(); ++x) {
            for (int r = vol.rmin(); r <= vol.rmax(); ++r) {
                if (!isScaleMaximal(vol, {x, y}, r, cfg)) continue;
                const double c = vol.cost(x, y, r);
                if (c < m.cost(x, y)) {
                    m.cost(x, y) = c;
                    m.radius(x, y) = r;
                }
            }
        }
    }
    return m;
}

ShockType classifyShock(int r, const std::vector<int>& neighborRadii, bool disconnected) {
    if (neighborRadii.empty()) return ShockType::Type4;
    const bool allLess = std::all_of(neighborRadii.begin(), neighborRadii.end(), [r](int v) { return v < r; });
    if (allLess) return ShockType::Type4;
    const bool allEqual = std::all_of(neighborRadii.begin(), neighborRadii.end(), [r](int v) { return v == r; });
    if (allEqual) return ShockType::Type3;
    const bool allGreater = std::all_of(neighborRadii.begin(), neighborRadii.end(), [r](int v) { return v > r; });
    if (allGreater && disconnected) return ShockType::Type2;
    return ShockType::Type1;
}

ShockType classifyShock(const MedialAxis& axis, Pixel x, int r) {
    // Ring order around x, so ring-adjacent entries are spatial neighbors too.
    static constexpr int kRing[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
    std::vector<int> radii;
    std::vector<Pixel> present;
    for (const auto& d : kRing) {
        const int q = axis.pointAt({x.x + d[0], x.y + d[1]});
        if (q >= 0) {
            radii.push_back(axis.point(q).radius);
            present.push_back({d[0], d[1]});
        }
    }
    // Count 8-connected groups among the present ring offsets.
    std::vector<int> label(present.size(), -1);
    int groups = 0;
    for (std::size_t i = 0; i < present.size(); ++i) {
        if (label[i] >= 0) continue;
        label[i] = groups;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            const std::size_t a = stack.back();
            stack.pop_back();
            for (std::size_t b = 0; b < present.size(); ++b) {
                if (label[b] >= 0) continue;
                if (std::abs(present[a].x - present[b].x) <= 1 && std::abs(present[a].y - present[b].y) <= 1) {
                    label[b] = groups;
                    stack.push_back(b);
                }
            }
        }
        ++groups;
    }
    return classifyShock(r, radii, groups > 1);
}

SeedQueue extractSeeds(const CostVolume& vol, const ShockConfig& cfg) {
    cfg.validate();
    const BestScaleMap best = bestScales(vol, cfg);
    std::vector<Seed> seeds;
    for (int y = 0; y < vol.height(); ++y) {
        for (int x = 0; x < vol.width(); ++x) {
            const int r = best.radius(x, y);
            if (r == 0) continue;
            const double c = best.cost(x, y);
            bool type4 = true;
            bool type3 = false;
            bool localMin = true;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= vol.width() || ny >= vol.height()) continue;
                    const int rn = best.radius(nx, ny);
                    if (rn == 0) continue;
                    if (rn >= r) type4 = false;
                    if (rn == r) type3 = true;
                    if (c > best.cost(nx, ny)) localMin = false;
                }
            }
            if (!localMin || !(type4 || type3)) continue;
            seeds.push_back({{x, y}, r, c, type4 ? ShockType::Type4 : ShockType::Type3});
        }
    }
    return SeedQueue(std::move(seeds));
}

void writeSeeds(std::ostream& out, const std::vector<Seed>& seeds) {
    for (const auto& s : seeds) {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), s.cost);
        out << s.pos.x << ' ' << s.pos.y << ' ' << s.radius << ' ' << std::string(buf, res.ptr) << ' '
            << toInt(s.type) << '\n';
    }
}

std::vector<Seed> readSeeds(std::istream& in) {
    std::vector<Seed> seeds;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        Seed s;
        std::string costText;
        int type = 0;
        if (!(ss >> s.pos.x >> s.pos.y >> s.radius >> costText >> type)) {
            throw std::runtime_error("seed dump line " + std::to_string(lineNo) + ": expected 'x y r cost type'");
        }
        auto res = std::from_chars(costText.data(), costText.data() + costText.size(), s.cost);
        if (res.ec != std::errc()) throw std::runtime_error("seed dump line " + std::to_string(lineNo) + ": bad cost");
        s.type = shockTypeFromInt(type);
        seeds.push_back(s);
    }
    return seeds;
}

}  // namespace asg
