#include <stdexcept>

#include "asg/cost.hpp"

namespace asg {

namespace {

// floor(sqrt(n)) for n >= 0 without floating-point rounding surprises.
int isqrt(int n) {
    int s = 0;
    while ((s + 1) * (s + 1) <= n) ++s;
    return s;
}

}  // namespace

DiskGeometry::DiskGeometry(int radius) : radius_(radius) {
    if (radius < 0) throw std::invalid_argument("disk radius must be >= 0");
    halfWidths_.resize(static_cast<std::size_t>(2 * radius + 1));
    for (int dy = -radius; dy <= radius; ++dy) {
        const int hw = isqrt(radius * radius - dy * dy);
        halfWidths_[static_cast<std::size_t>(dy + radius)] = hw;
        area_ += static_cast<std::size_t>(2 * hw + 1);
        for (int dx = -hw; dx <= hw; ++dx) offsets_.push_back({dx, dy});
    }
}

DiskTable::DiskTable(int maxRadius) {
    if (maxRadius < 0) throw std::invalid_argument("disk table needs maxRadius >= 0");
    disks_.reserve(static_cast<std::size_t>(maxRadius + 1));
    for (int r = 0; r <= maxRadius; ++r) disks_.emplace_back(r);
}

}  // namespace asg
