#include <cmath>
#include <stdexcept>

#include "asg/cost.hpp"

namespace asg {

double bhattacharyya(const std::uint16_t* h1, const std::uint16_t* h2, int bins) {
    double s1 = 0.0;
    double s2 = 0.0;
    double overlap = 0.0;
    for (int i = 0; i < bins; ++i) {
        const double a = h1[i];
        const double b = h2[i];
        s1 += a;
        s2 += b;
        overlap += std::sqrt(a * b);
    }
    if (s1 <= 0.0 || s2 <= 0.0) return 1.0;
    const double v = 1.0 - overlap / std::sqrt(s1 * s2);
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

double bhattacharyya(const std::vector<double>& h1, const std::vector<double>& h2) {
    if (h1.size() != h2.size()) throw std::invalid_argument("bhattacharyya: histogram sizes differ");
    double s1 = 0.0;
    double s2 = 0.0;
    double overlap = 0.0;
    for (std::size_t i = 0; i < h1.size(); ++i) {
        if (h1[i] < 0.0 || h2[i] < 0.0) throw std::invalid_argument("bhattacharyya: negative bin");
        s1 += h1[i];
        s2 += h2[i];
        overlap += std::sqrt(h1[i] * h2[i]);
    }
    if (s1 <= 0.0 || s2 <= 0.0) return 1.0;
    const double v = 1.0 - overlap / std::sqrt(s1 * s2);
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

std::vector<std::uint16_t> diskHistogram(const RgbImage& img, const TileGrid& grid, Pixel x, int r, int bins) {
    std::vector<std::uint16_t> h(static_cast<std::size_t>(3 * bins), 0);
    const double reach = r - grid.tileSize() * std::sqrt(2.0) / 2.0;
    int tiles = 0;
    if (reach >= 0.0) {
        const double reach2 = reach * reach;
        for (int row = 0; row < grid.rows(); ++row) {
            const double dy = grid.centerY(row) - x.y;
            if (dy * dy > reach2) continue;
            for (int col = 0; col < grid.cols(); ++col) {
                const double dx = grid.centerX(col) - x.x;
                if (dx * dx + dy * dy > reach2) continue;
                const Vec3& m = grid.mean(row, col);
                for (int c = 0; c < 3; ++c) ++h[static_cast<std::size_t>(c * bins + histogramBin(m[c], bins))];
                ++tiles;
            }
        }
    }
    if (tiles == 0) {
        const DiskGeometry disk(r);
        for (const Pixel& o : disk.offsets()) {
            const int px = x.x + o.x;
            const int py = x.y + o.y;
            if (!img.contains(px, py)) continue;
            const Vec3& v = img(px, py);
            for (int c = 0; c < 3; ++c) ++h[static_cast<std::size_t>(c * bins + histogramBin(v[c], bins))];
        }
    }
    return h;
}

}  // namespace asg
