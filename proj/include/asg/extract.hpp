#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asg/config.hpp"
#include "asg/cost.hpp"
#include "asg/growth.hpp"
#include "asg/medial_axis.hpp"
#include "asg/shock.hpp"

namespace asg {

/// Wall-clock seconds per pipeline stage.
struct StageTimings {
    double proposalGeneration = 0.0;
    double seedGrowth = 0.0;
    double endPointGrowth = 0.0;
    double other = 0.0;

    double total() const { return proposalGeneration + seedGrowth + endPointGrowth + other; }
};

struct GrowthRun {
    MedialAxis axis;
    /// Seeds as extracted, in queue order.
    std::vector<Seed> seeds;
    double seedGrowthSeconds = 0.0;
    double endPointSeconds = 0.0;
    double otherSeconds = 0.0;
};

/// Seed extraction, the select/grow/prune loop and end-point growth over a
/// prebuilt cost volume.
GrowthRun runGrowth(const CostVolume& vol, const ShockConfig& shock, const GrowthConfig& growth);

struct ExtractionResult {
    MedialAxis axis;
    CostVolume volume;
    std::vector<Seed> seeds;
    StageTimings timings;
    /// H * W * number of scales: what an exhaustive search would examine.
    std::uint64_t exhaustiveProposals = 0;
    std::vector<std::string> warnings;
};

/// Smooth, build the cost volume, then grow the axis.
ExtractionResult extract(const RgbImage& img, const RunConfig& cfg);

}  // namespace asg
