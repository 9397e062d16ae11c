#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "asg/image.hpp"
#include "asg/imgproc.hpp"

namespace asg {

/// Cost of a disk that is not fully inside the image. Search code treats it as
/// infinitely expensive.
inline constexpr double kInvalidCost = std::numeric_limits<double>::infinity();

/// Smallest radius of the enclosed sub-disks compared against a disk in the
/// homogeneity sum. Independent of the scale range, so the cost at r = rmin
/// still depends on the image.
inline constexpr int kSubDiskMinRadius = 1;

/// Color features are CIELAB divided by the extent of the sRGB gamut per
/// channel (L: 100, a: 184.417, b: 202.3382), which puts squared feature
/// distances on the scale the default w_s assumes.
inline constexpr Vec3 kLabFeatureScale{1.0 / 100.0, 1.0 / 184.417, 1.0 / 202.3382};

// ---------------------------------------------------------------------------
// Disk geometry
// ---------------------------------------------------------------------------

/// Digital disk: all integer offsets (dx,dy) with dx^2 + dy^2 <= r^2.
class DiskGeometry {
public:
    explicit DiskGeometry(int radius);

    int radius() const { return radius_; }
    std::size_t area() const { return area_; }
    /// Largest |dx| on row dy, for |dy| <= r.
    int halfWidth(int dy) const { return halfWidths_[static_cast<std::size_t>(dy + radius_)]; }
    const std::vector<Pixel>& offsets() const { return offsets_; }

    /// True when the whole disk centered at (x,y) lies in a width x height image.
    static bool fits(int x, int y, int radius, int width, int height) {
        return x - radius >= 0 && y - radius >= 0 && x + radius < width && y + radius < height;
    }

private:
    int radius_;
    std::size_t area_ = 0;
    std::vector<int> halfWidths_;
    std::vector<Pixel> offsets_;
};

/// Geometries for radii 0..maxRadius, built once.
class DiskTable {
public:
    explicit DiskTable(int maxRadius);
    const DiskGeometry& operator[](int r) const { return disks_.at(static_cast<std::size_t>(r)); }
    int maxRadius() const { return static_cast<int>(disks_.size()) - 1; }

private:
    std::vector<DiskGeometry> disks_;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class CostKind { Color, Hist };

const char* toString(CostKind kind);
CostKind parseCostKind(const std::string& text);

struct CostConfig {
    CostKind kind = CostKind::Color;
    double ws = 1e-4;
    int rmin = 2;
    int rmax = 41;
    int bins = 10;
    int tileSize = 6;

    static double defaultWs(CostKind kind) { return kind == CostKind::Color ? 1e-4 : 2e-8; }
    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Histograms
// ---------------------------------------------------------------------------

/// Bhattacharyya distance between two unnormalized histograms given as counts.
/// Normalization is folded into a single square root of the product of the
/// totals, so identical (or single-bin proportional) histograms give exactly 0.
/// An empty histogram is at distance 1 from everything.
double bhattacharyya(const std::uint16_t* h1, const std::uint16_t* h2, int bins);
double bhattacharyya(const std::vector<double>& h1, const std::vector<double>& h2);

/// Bin index for a channel value in [0,1].
inline int histogramBin(double v, int bins) {
    // The slack keeps tile means that land a rounding error below a bin edge
    // in the same bin as the pixels they average.
    int b = static_cast<int>(v * bins + 1e-9);
    if (b < 0) b = 0;
    if (b >= bins) b = bins - 1;
    return b;
}

/// Per-channel histogram of the disk D(x,r), bins*3 counts laid out channel
/// by channel. Built from the tiles whose center lies within
/// r - tileSize*sqrt(2)/2 of the disk center; when no tile qualifies, from the
/// pixels of the digital disk instead.
std::vector<std::uint16_t> diskHistogram(const RgbImage& img, const TileGrid& grid, Pixel x, int r, int bins);

// ---------------------------------------------------------------------------
// Cost evaluators
// ---------------------------------------------------------------------------

/// Color homogeneity cost over a fixed image. Precomputes per-radius mean-Lab
/// maps up to maxRadius; cost() is then O(r^2).
class ColorCostModel {
public:
    ColorCostModel(const LabImage& lab, const CostConfig& cfg, int maxRadius);
    ~ColorCostModel();
    ColorCostModel(ColorCostModel&&) noexcept;
    ColorCostModel& operator=(ColorCostModel&&) noexcept;

    /// kInvalidCost when the disk does not fit or r is outside [rmin, maxRadius].
    double cost(int x, int y, int r) const;
    /// Mean scaled Lab feature over D(x,r), relative to the model's reference color.
    Vec3 meanFeature(int x, int y, int r) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Histogram cost over a fixed image.
class HistCostModel {
public:
    HistCostModel(const RgbImage& img, const TileGrid& grid, const CostConfig& cfg, int maxRadius);
    ~HistCostModel();
    HistCostModel(HistCostModel&&) noexcept;
    HistCostModel& operator=(HistCostModel&&) noexcept;

    double cost(int x, int y, int r) const;
    /// Number of distinct per-disk histograms seen during precomputation.
    std::size_t distinctHistograms() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-off evaluations. Each call precomputes what it needs, so prefer the
/// model classes or buildCostVolume for more than a handful of queries.
double colorCost(const LabImage& lab, Pixel x, int r, const CostConfig& cfg);
double histCost(const TileGrid& grid, const RgbImage& img, Pixel x, int r, const CostConfig& cfg);

// ---------------------------------------------------------------------------
// Cost volume
// ---------------------------------------------------------------------------

/// Dense C(x,r) over all pixels and scales [rmin, rmax]; scale-major storage.
class CostVolume {
public:
    CostVolume() = default;
    CostVolume(int width, int height, int rmin, int rmax, CostKind kind);

    int width() const { return width_; }
    int height() const { return height_; }
    int rmin() const { return rmin_; }
    int rmax() const { return rmax_; }
    int numScales() const { return rmax_ >= rmin_ ? rmax_ - rmin_ + 1 : 0; }
    CostKind kind() const { return kind_; }

    bool inRange(int x, int y, int r) const {
        return x >= 0 && y >= 0 && x < width_ && y < height_ && r >= rmin_ && r <= rmax_;
    }
    /// kInvalidCost for out-of-range queries and for disks outside the image.
    double cost(int x, int y, int r) const {
        return inRange(x, y, r) ? costs_[index(x, y, r)] : kInvalidCost;
    }
    double cost(Pixel p, int r) const { return cost(p.x, p.y, r); }
    bool valid(int x, int y, int r) const { return cost(x, y, r) != kInvalidCost; }
    void set(int x, int y, int r, double c) { costs_[index(x, y, r)] = c; }

    std::size_t slots() const { return costs_.size(); }
    std::size_t validCount() const;
    const std::vector<double>& data() const { return costs_; }

    /// Number of cost evaluations performed while filling the volume.
    std::uint64_t evaluations = 0;
    /// Requested rmax before truncation to the image size (equal to rmax when
    /// nothing was truncated).
    int requestedRmax = 0;
    /// Non-empty when the scale range had to be truncated.
    std::string warning;

private:
    std::size_t index(int x, int y, int r) const {
        return (static_cast<std::size_t>(r - rmin_) * height_ + y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    int rmin_ = 0;
    int rmax_ = -1;
    CostKind kind_ = CostKind::Color;
    std::vector<double> costs_;
};

/// Largest radius for which some disk fits in the image.
inline int maxFittingRadius(int width, int height) { return (std::min(width, height) - 1) / 2; }

/// Fills a cost volume for an (already smoothed) image.
CostVolume buildCostVolume(const RgbImage& img, const CostConfig& cfg);

/// Binary dump: "ASGC", uint32 version, int32 width, height, rmin, rmax,
/// uint32 kind, then float32 costs (scale-major, row-major), INVALID as +inf.
void saveCostVolume(const std::filesystem::path& path, const CostVolume& vol);
CostVolume loadCostVolume(const std::filesystem::path& path);

}  // namespace asg
