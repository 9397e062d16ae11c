#include <chrono>

#include "asg/extract.hpp"

namespace asg {

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Seeds inside an accepted disk or next to an axis point are not grown.
bool coveredByAxis(const MedialAxis& axis, Pixel p) {
    return axis.covered(p) || axis.occupied(p) || axis.degree(p) > 0;
}

}  // namespace

GrowthRun runGrowth(const CostVolume& vol, const ShockConfig& shock, const GrowthConfig& growth) {
    growth.validate();
    GrowthRun run;
    run.axis = MedialAxis(vol.width(), vol.height());

    auto t0 = Clock::now();
    SeedQueue queue = extractSeeds(vol, shock);
    run.seeds = queue.remaining();
    run.otherSeconds += secondsSince(t0);

    double pruneSeconds = 0.0;
    t0 = Clock::now();
    while (!queue.empty()) {
        const Seed s = queue.pop();
        if (coveredByAxis(run.axis, s.pos)) {
            ++run.axis.counters.seedsSkipped;
            continue;
        }
        growSeed(s, vol, run.axis, growth);
        const auto tp = Clock::now();
        run.axis.counters.seedsPruned += pruneSeeds(queue, run.axis, growth);
        pruneSeconds += secondsSince(tp);
    }
    run.seedGrowthSeconds = secondsSince(t0) - pruneSeconds;
    run.otherSeconds += pruneSeconds;

    t0 = Clock::now();
    growEndPoints(vol, run.axis, growth);
    run.endPointSeconds = secondsSince(t0);
    return run;
}

ExtractionResult extract(const RgbImage& img, const RunConfig& cfg) {
    cfg.validate();
    ExtractionResult res;

    auto t0 = Clock::now();
    const RgbImage smoothed = cfg.smooth ? smoothL0(img, cfg.smoothParams()) : img;
    res.timings.other += secondsSince(t0);

    t0 = Clock::now();
    res.volume = buildCostVolume(smoothed, cfg.costConfig());
    res.timings.proposalGeneration = secondsSince(t0);
    if (!res.volume.warning.empty()) res.warnings.push_back(res.volume.warning);
    res.exhaustiveProposals = static_cast<std::uint64_t>(img.width()) * img.height() *
                              static_cast<std::uint64_t>(res.volume.numScales());

    GrowthRun run = runGrowth(res.volume, cfg.shockConfig(), cfg.growthConfig());
    res.axis = std::move(run.axis);
    res.seeds = std::move(run.seeds);
    res.timings.seedGrowth = run.seedGrowthSeconds;
    res.timings.endPointGrowth = run.endPointSeconds;
    res.timings.other += run.otherSeconds;
    return res;
}

}  // namespace asg
