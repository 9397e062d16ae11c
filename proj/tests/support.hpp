#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "asg/config.hpp"
#include "asg/cost.hpp"
#include "asg/eval.hpp"
#include "asg/extract.hpp"
#include "asg/synth.hpp"

namespace asg {

// Readable doctest output for enums.
inline std::ostream& operator<<(std::ostream& os, CostKind k) { return os << toString(k); }
inline std::ostream& operator<<(std::ostream& os, ShockType t) { return os << "Type" << toInt(t); }

}  // namespace asg

namespace asg::test {

std::filesystem::path fixtureDir();
ShapeSpec loadFixture(const std::string& name);
/// The four geometry fixtures, by name.
const std::vector<std::string>& geometryFixtures();

Mask foreground(const Rendering& r);
RgbImage constantImage(int w, int h, const Vec3& c);
/// Random flat colors on block x block cells plus uniform jitter of +-jitter.
RgbImage blockImage(int w, int h, int block, double jitter, std::uint64_t seed);
/// i.i.d. uniform noise in [0,1].
RgbImage noiseImage(int w, int h, std::uint64_t seed);

/// Direct evaluation of the color homogeneity cost: every enclosed sub-disk
/// is visited pixel by pixel.
double naiveColorCost(const LabImage& lab, int x, int y, int r, const CostConfig& cfg);
/// Direct evaluation of the histogram cost from diskHistogram + bhattacharyya.
double naiveHistCost(const RgbImage& img, const TileGrid& grid, int x, int y, int r, const CostConfig& cfg);

/// Maximum bipartite matching size by simple augmenting paths (Kuhn).
std::size_t kuhnMatching(const Mask& pred, const Mask& gt, double tol);

/// Axis invariants: branch connectivity, one-pixel width, junction flags,
/// cost bound, stored costs and coverage. Empty when all hold.
std::vector<std::string> axisViolations(const MedialAxis& axis, const CostVolume& vol);
/// Scale maximality and local-minimum checks re-derived from the volume.
std::vector<std::string> seedViolations(const std::vector<Seed>& seeds, const CostVolume& vol,
                                        const ShockConfig& cfg);

struct Fidelity {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double seconds = 0.0;
    std::size_t predPixels = 0;
    std::size_t gtPixels = 0;
};

/// Extracts the axis of a rendered fixture and scores it against the oracle
/// skeleton of the foreground. Predictions are restricted to the foreground
/// and oracle pixels below rmin are dropped, since neither side can represent
/// them. Tolerance is 1% of the diagonal.
Fidelity fixtureFidelity(const ShapeSpec& spec, CostKind kind);

/// Two annotations that disagree: a horizontal bar and a vertical bar.
struct ConflictFixture {
    Mask a;
    Mask b;
};
ConflictFixture conflictFixture();

}  // namespace asg::test
