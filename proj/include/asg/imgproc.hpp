#pragma once

#include <filesystem>
#include <vector>

#include "asg/image.hpp"

namespace asg {

// ---------------------------------------------------------------------------
// Image IO
// ---------------------------------------------------------------------------

/// Loads a PNG (any bit depth / color type) or binary PPM (P6) and normalizes
/// channels to [0,1]. Gray inputs are replicated to three channels and alpha
/// is dropped. Throws ImageError on unreadable, truncated or empty files.
RgbImage loadImage(const std::filesystem::path& path);

/// Reads a single-channel PNG mask; any nonzero sample becomes 1.
Mask loadMask(const std::filesystem::path& path);

/// Reads a single-channel PNG as raw 16-bit samples (8-bit files are widened
/// without scaling, so a radius of 7 stays 7).
Gray16 loadGray16(const std::filesystem::path& path);

void savePng(const std::filesystem::path& path, const RgbImage& img);
/// Mask pixels are written as 0 / 255.
void savePng(const std::filesystem::path& path, const Mask& mask);
void savePng16(const std::filesystem::path& path, const Gray16& img);
void savePpm(const std::filesystem::path& path, const RgbImage& img);

// ---------------------------------------------------------------------------
// Smoothing
// ---------------------------------------------------------------------------

struct L0Params {
    double lambda = 2e-2;
    double kappa = 2.0;
    double betaMax = 1e5;
};

/// Number of outer iterations smoothL0 runs for the given parameters.
int l0IterationCount(const L0Params& params);

/// L0 gradient minimization (half-quadratic splitting, FFT solve with periodic
/// boundary). Output has the input's dimensions and is clamped to [0,1].
RgbImage smoothL0(const RgbImage& img, const L0Params& params = {});

// ---------------------------------------------------------------------------
// Color
// ---------------------------------------------------------------------------

Vec3 srgbToLab(const Vec3& rgb);
Vec3 labToSrgb(const Vec3& lab);
/// CIE76 color difference.
double deltaE(const Vec3& lab1, const Vec3& lab2);

LabImage toLab(const RgbImage& img);

// ---------------------------------------------------------------------------
// Tiles
// ---------------------------------------------------------------------------

/// Per-tile, per-channel mean intensities over a square tiling. Tiles on the
/// right/bottom edge may be partial; they average only the covered pixels.
class TileGrid {
public:
    TileGrid() = default;
    TileGrid(int tileSize, int imageWidth, int imageHeight);

    int tileSize() const { return tileSize_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int imageWidth() const { return imageWidth_; }
    int imageHeight() const { return imageHeight_; }

    Vec3& mean(int row, int col) { return means_[static_cast<std::size_t>(row) * cols_ + col]; }
    const Vec3& mean(int row, int col) const { return means_[static_cast<std::size_t>(row) * cols_ + col]; }

    /// Geometric center of the pixels a tile covers, in pixel coordinates.
    double centerX(int col) const;
    double centerY(int row) const;

private:
    int tileSize_ = 0;
    int imageWidth_ = 0;
    int imageHeight_ = 0;
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Vec3> means_;
};

TileGrid buildTileGrid(const RgbImage& img, int tileSize = 6);

}  // namespace asg
