#include <algorithm>
#include <stdexcept>

#include "asg/imgproc.hpp"

namespace asg {

TileGrid::TileGrid(int tileSize, int imageWidth, int imageHeight)
    : tileSize_(tileSize), imageWidth_(imageWidth), imageHeight_(imageHeight) {
    if (tileSize < 1) throw std::invalid_argument("tile size must be >= 1");
    rows_ = (imageHeight + tileSize - 1) / tileSize;
    cols_ = (imageWidth + tileSize - 1) / tileSize;
    means_.assign(static_cast<std::size_t>(rows_) * cols_, Vec3{0.0, 0.0, 0.0});
}

double TileGrid::centerX(int col) const {
    const int x0 = col * tileSize_;
    const int x1 = std::min(imageWidth_, x0 + tileSize_) - 1;
    return 0.5 * (x0 + x1);
}

double TileGrid::centerY(int row) const {
    const int y0 = row * tileSize_;
    const int y1 = std::min(imageHeight_, y0 + tileSize_) - 1;
    return 0.5 * (y0 + y1);
}

TileGrid buildTileGrid(const RgbImage& img, int tileSize) {
    TileGrid grid(tileSize, img.width(), img.height());
    for (int row = 0; row < grid.rows(); ++row) {
        const int y0 = row * tileSize;
        const int y1 = std::min(img.height(), y0 + tileSize);
        for (int col = 0; col < grid.cols(); ++col) {
            const int x0 = col * tileSize;
            const int x1 = std::min(img.width(), x0 + tileSize);
            Vec3 sum{0.0, 0.0, 0.0};
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    for (int c = 0; c < 3; ++c) sum[c] += img(x, y)[c];
                }
            }
            const double n = static_cast<double>((y1 - y0) * (x1 - x0));
            grid.mean(row, col) = {sum[0] / n, sum[1] / n, sum[2] / n};
        }
    }
    return grid;
}

}  // namespace asg
