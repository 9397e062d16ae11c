#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "asg/image.hpp"

namespace asg {

/// Default limit on candidate (pred, gt) pairs before matching switches from
/// maximum-cardinality to greedy nearest-first.
inline constexpr long long kDefaultMatchCap = 20000000;

struct MatchResult {
    Mask matchedPred;
    Mask matchedGt;
    std::size_t tpPred = 0;
    std::size_t tpGt = 0;
    std::size_t predCount = 0;
    std::size_t gtCount = 0;
    double tolerance = 0.0;
    /// True when the candidate graph exceeded the cap and greedy matching ran.
    bool greedy = false;
    /// Matched (pred, gt) pixel pairs.
    std::vector<std::pair<Pixel, Pixel>> pairs;
};

/// One-to-one matching of skeleton pixels at Euclidean distance <= tol.
/// Maximum cardinality (Hopcroft-Karp) unless the number of candidate pairs
/// exceeds `cap`. Throws std::invalid_argument on size mismatch or tol < 0.
MatchResult matchSkeletons(const Mask& pred, const Mask& gt, double tol, long long cap = kDefaultMatchCap);

/// Tolerance in pixels for a fraction of the image diagonal.
double toleranceForImage(int width, int height, double fraction);

/// 2PR / (P + R), 0 when P + R = 0.
double f1Score(double precision, double recall);

struct Annotation {
    Mask skeleton;
    std::optional<Gray16> radius;
};

struct AnnotationScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tpPred = 0;
    std::size_t tpGt = 0;
    std::size_t predCount = 0;
    std::size_t gtCount = 0;
    /// Ligature-weighted recall, when weights were supplied.
    std::optional<double> weightedRecall;
    std::optional<double> weightedPrecision;
};

struct EvalResult {
    std::string protocol;  // "standard" or "single"
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool weighted = false;
    /// Single-annotation protocol: index of the annotation that was reported.
    int bestAnnotation = -1;
    double tolerance = 0.0;
    std::vector<AnnotationScore> perAnnotation;
};

/// Precision over the union of pred pixels matched to any annotation; recall
/// as matched GT pixels over all GT pixels, summed over annotations.
EvalResult scoreStandard(const Mask& pred, const std::vector<Annotation>& annotations, double tol,
                         long long cap = kDefaultMatchCap);

/// Scores pred against each annotation alone and reports the best F1.
EvalResult scoreSingleAnnotation(const Mask& pred, const std::vector<Annotation>& annotations, double tol,
                                 long long cap = kDefaultMatchCap);

/// Per skeleton pixel: the fraction of its digital disk not covered by the
/// disks of skeleton pixels within `horizon` steps along the skeleton
/// (8-connected). 0 off the skeleton.
Raster<double> ligatureWeights(const Mask& skeleton, const Gray16& radius, int horizon = 3);

/// Recall weighted by per-GT-pixel weights (one raster per annotation).
/// Precision stays unweighted unless weightPrecision is set, in which case a
/// matched pred pixel counts with its partner's weight and unmatched ones
/// with weight 1. protocol is "standard" or "single".
EvalResult scoreWeighted(const Mask& pred, const std::vector<Annotation>& annotations,
                         const std::vector<Raster<double>>& weights, double tol, const std::string& protocol,
                         bool weightPrecision = false, long long cap = kDefaultMatchCap);

}  // namespace asg
