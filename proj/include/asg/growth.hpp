#pragma once

#include <vector>

#include "asg/cost.hpp"
#include "asg/medial_axis.hpp"
#include "asg/shock.hpp"

namespace asg {

struct GrowthConfig {
    double alphaC = 0.75;
    int lMax = 10;
    /// Length weight at l = lMax; alpha(1) is always 1.
    double alphaMin = 0.85;
    int directions = 16;
    double relaxFactor = 2.0;
    int scaleStep = 1;
    /// A fragment is subsumed once this fraction of its disk pixels is covered.
    double subsumeFraction = 1.0;
    /// Disks are eroded by this many pixels before the subsumption test, so
    /// that a sliver on the rim of a digital disk does not count as new area.
    int subsumeMargin = 1;
    /// Minimum angular separation (degrees) between branches leaving a point.
    double junctionAngle = 45.0;

    void validate() const;
    /// Linear from alpha(1) = 1 to alpha(lMax) = alphaMin.
    double alpha(int l) const;
};

struct FragmentPoint {
    Pixel pos;
    int radius = 0;
    double cost = 0.0;
};

struct Fragment {
    std::vector<FragmentPoint> points;
    int direction = 0;
    double cost = 0.0;
    /// The last point touches an existing branch away from the anchor.
    bool joins = false;

    int length() const { return static_cast<int>(points.size()); }
};

/// How candidate fragments may touch the axis near their anchor.
enum class AnchorMode {
    /// Continue a branch from its tip: the first point may touch only the anchor.
    Tip,
    /// Start a new branch at a seed or junction: the first point may touch the
    /// axis close to the anchor, and directions close to branches already
    /// leaving the anchor are excluded.
    Spawn,
};

/// Unit step of quantized direction k for a ray with `directions` angles.
/// Position j along the ray is anchor + round(j * step).
struct RayStep {
    double dx;
    double dy;
};
RayStep rayStep(int k, int directions);
Pixel rayPoint(Pixel anchor, int k, int j, int directions);
/// Smallest angle between two quantized directions, in degrees.
double directionAngle(int a, int b, int directions);
/// Quantized direction nearest to the vector (dx, dy).
int nearestDirection(double dx, double dy, int directions);

/// Fragment search bookkeeping: distinct cost lookups (memoized per call).
struct ProposalLog {
    std::uint64_t lookups = 0;
};

/// Valid fragments from an axis point. `incomingDir` < 0 disables the
/// back-fold rule.
std::vector<Fragment> candidateFragments(int anchor, const CostVolume& vol, const MedialAxis& axis,
                                         const GrowthConfig& cfg, double ctol, AnchorMode mode, int incomingDir,
                                         ProposalLog* log = nullptr);

/// Lowest fragment cost; ties go to the lower direction index, then the
/// longer fragment. Returns -1 for an empty list.
int selectFragment(const std::vector<Fragment>& frags);

/// True when at least two fragments in directions more than junctionAngle
/// apart could start a new branch at the point.
bool detectJunction(int point, const MedialAxis& axis, const CostVolume& vol, const GrowthConfig& cfg);

/// Grows one seed into the axis. Returns the seed id assigned by the axis.
int growSeed(const Seed& seed, const CostVolume& vol, MedialAxis& axis, const GrowthConfig& cfg);

/// Drops seeds lying next to an axis point of similar radius or whose disk is
/// already covered. Returns how many were removed.
std::size_t pruneSeeds(SeedQueue& queue, const MedialAxis& axis, const GrowthConfig& cfg = {});

/// Extends every end point with the relaxed tolerance until nothing attaches.
void growEndPoints(const CostVolume& vol, MedialAxis& axis, const GrowthConfig& cfg);

}  // namespace asg
