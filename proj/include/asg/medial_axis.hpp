#pragma once

#include <cstdint>
#include <vector>

#include "asg/cost.hpp"
#include "asg/image.hpp"

namespace asg {

enum PointFlag : std::uint8_t {
    kSeedOrigin = 1,
    kJunction = 2,
    kEndPoint = 4,
    kRelaxedGrowth = 8,
};

struct MedialPoint {
    Pixel pos;
    int radius = 0;
    double cost = 0.0;
    int branchId = -1;
    int seedId = -1;
    /// Quantized growth direction that produced this point, -1 for seeds.
    int incomingDir = -1;
    std::uint8_t flags = 0;

    bool has(PointFlag f) const { return (flags & f) != 0; }
};

struct GrowthCounters {
    /// Distinct (x, r) cost lookups made while searching for fragments.
    std::uint64_t proposalsExamined = 0;
    std::uint64_t seedGrowthProposals = 0;
    std::uint64_t endPointProposals = 0;
    std::uint64_t fragmentsAttached = 0;
    std::uint64_t relaxedFragments = 0;
    std::uint64_t seedsGrown = 0;
    std::uint64_t seedsPruned = 0;
    std::uint64_t seedsSkipped = 0;
};

/// Accepted medial points, their branches and the union of their disks.
class MedialAxis {
public:
    MedialAxis() = default;
    MedialAxis(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    /// Index of the point at p, or -1.
    int pointAt(Pixel p) const {
        return (p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_) ? grid_[index(p)] : -1;
    }
    bool occupied(Pixel p) const { return pointAt(p) >= 0; }

    const std::vector<MedialPoint>& points() const { return points_; }
    const MedialPoint& point(int i) const { return points_[static_cast<std::size_t>(i)]; }
    MedialPoint& point(int i) { return points_[static_cast<std::size_t>(i)]; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    /// Point indices per branch, in attachment order.
    const std::vector<std::vector<int>>& branches() const { return branches_; }
    int addBranch();
    /// Appends p to the branch; throws if the pixel is taken or out of bounds.
    int addPoint(MedialPoint p, int branch);

    /// Growth tolerance registered for a seed; returns the seed id.
    int registerSeed(double ctol);
    double seedTolerance(int seedId) const { return seedCtol_[static_cast<std::size_t>(seedId)]; }
    std::size_t seedCount() const { return seedCtol_.size(); }

    /// Axis points in the 8-neighborhood of p (p itself excluded).
    std::vector<int> neighbors(Pixel p) const;
    int degree(Pixel p) const;

    bool covered(Pixel p) const { return coverage_[p] != 0; }
    const Mask& coverage() const { return coverage_; }
    /// Pixels of the digital disk D(c,r) (clipped to the image) not yet covered.
    std::size_t uncoveredInDisk(Pixel c, int r) const;
    bool diskCovered(Pixel c, int r) const { return uncoveredInDisk(c, r) == 0; }

    /// Recomputes junction (degree >= 3) and end-point (degree <= 1) flags.
    void refreshFlags();

    Mask skeletonMask() const;
    Gray16 radiusMap() const;

    GrowthCounters counters;

private:
    std::size_t index(Pixel p) const { return static_cast<std::size_t>(p.y) * width_ + p.x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<int> grid_;
    std::vector<MedialPoint> points_;
    std::vector<std::vector<int>> branches_;
    std::vector<double> seedCtol_;
    Mask coverage_;
    // Per row, prefix counts of covered pixels (width + 1 entries).
    std::vector<std::vector<int>> coveredPrefix_;
};

}  // namespace asg
