#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asg/medial_axis.hpp"

namespace asg {

namespace {

int isqrtFloor(int n) {
    int s = static_cast<int>(std::sqrt(static_cast<double>(n)));
    while (s * s > n) --s;
    while ((s + 1) * (s + 1) <= n) ++s;
    return s;
}

}  // namespace

MedialAxis::MedialAxis(int width, int height)
    : width_(width), height_(height),
      grid_(static_cast<std::size_t>(width) * height, -1),
      coverage_(width, height, 0),
      coveredPrefix_(static_cast<std::size_t>(height), std::vector<int>(static_cast<std::size_t>(width) + 1, 0)) {}

int MedialAxis::addBranch() {
    branches_.emplace_back();
    return static_cast<int>(branches_.size()) - 1;
}

int MedialAxis::registerSeed(double ctol) {
    seedCtol_.push_back(ctol);
    return static_cast<int>(seedCtol_.size()) - 1;
}

int MedialAxis::addPoint(MedialPoint p, int branch) {
    if (p.pos.x < 0 || p.pos.y < 0 || p.pos.x >= width_ || p.pos.y >= height_) {
        throw std::out_of_range("medial point outside image");
    }
    if (occupied(p.pos)) throw std::logic_error("medial point already occupied");
    if (branch < 0 || branch >= static_cast<int>(branches_.size())) throw std::out_of_range("bad branch id");
    p.branchId = branch;
    const int id = static_cast<int>(points_.size());
    points_.push_back(p);
    grid_[index(p.pos)] = id;
    branches_[static_cast<std::size_t>(branch)].push_back(id);

    const int r = p.radius;
    for (int dy = -r; dy <= r; ++dy) {
        const int y = p.pos.y + dy;
        if (y < 0 || y >= height_) continue;
        const int hw = isqrtFloor(r * r - dy * dy);
        const int x0 = std::max(0, p.pos.x - hw);
        const int x1 = std::min(width_ - 1, p.pos.x + hw);
        bool changed = false;
        for (int x = x0; x <= x1; ++x) {
            if (!coverage_(x, y)) {
                coverage_(x, y) = 1;
                changed = true;
            }
        }
        if (changed) {
            auto& pre = coveredPrefix_[static_cast<std::size_t>(y)];
            for (int x = x0; x < width_; ++x) pre[static_cast<std::size_t>(x) + 1] = pre[static_cast<std::size_t>(x)] + coverage_(x, y);
        }
    }
    return id;
}

std::vector<int> MedialAxis::neighbors(Pixel p) const {
    std::vector<int> out;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int q = pointAt({p.x + dx, p.y + dy});
            if (q >= 0) out.push_back(q);
        }
    }
    return out;
}

int MedialAxis::degree(Pixel p) const {
    int n = 0;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if ((dx != 0 || dy != 0) && occupied({p.x + dx, p.y + dy})) ++n;
        }
    }
    return n;
}

std::size_t MedialAxis::uncoveredInDisk(Pixel c, int r) const {
    std::size_t missing = 0;
    for (int dy = -r; dy <= r; ++dy) {
        const int y = c.y + dy;
        if (y < 0 || y >= height_) continue;
        const int hw = isqrtFloor(r * r - dy * dy);
        const int x0 = std::max(0, c.x - hw);
        const int x1 = std::min(width_ - 1, c.x + hw);
        if (x1 < x0) continue;
        const auto& pre = coveredPrefix_[static_cast<std::size_t>(y)];
        const int have = pre[static_cast<std::size_t>(x1) + 1] - pre[static_cast<std::size_t>(x0)];
        missing += static_cast<std::size_t>(x1 - x0 + 1 - have);
    }
    return missing;
}

void MedialAxis::refreshFlags() {
    for (auto& p : points_) {
        const int d = degree(p.pos);
        p.flags = static_cast<std::uint8_t>(p.flags & ~(kJunction | kEndPoint));
        if (d >= 3) p.flags |= kJunction;
        if (d <= 1) p.flags |= kEndPoint;
    }
}

Mask MedialAxis::skeletonMask() const {
    Mask m(width_, height_, 0);
    for (const auto& p : points_) m[p.pos] = 1;
    return m;
}

Gray16 MedialAxis::radiusMap() const {
    Gray16 m(width_, height_, 0);
    for (const auto& p : points_) m[p.pos] = static_cast<std::uint16_t>(std::clamp(p.radius, 0, 65535));
    return m;
}

}  // namespace asg
