#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "asg/cost.hpp"
#include "asg/growth.hpp"
#include "asg/imgproc.hpp"
#include "asg/shock.hpp"

namespace asg {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every tunable of a run. Serialized as flat `key=value` lines in a fixed key
/// order; numbers use the shortest round-trip representation.
struct RunConfig {
    CostKind cost = CostKind::Color;
    double wsColor = 1e-4;
    double wsHist = 2e-8;
    int rmin = 2;
    int rmax = 41;
    std::string resolution = "half";
    int bins = 10;
    int tileSize = 6;

    bool smooth = true;
    double smoothLambda = 2e-2;
    double smoothKappa = 2.0;
    double smoothBetaMax = 1e5;

    double deltaR = 0.0;
    int epsilonR = 1;

    double alphaC = 0.75;
    int lMax = 10;
    double alphaMin = 0.85;
    int directions = 16;
    double relaxFactor = 2.0;
    int scaleStep = 1;
    double subsumeFraction = 1.0;
    int subsumeMargin = 1;
    double junctionAngle = 45.0;

    /// Match tolerance as a fraction of the image diagonal.
    double evalTol = 0.01;
    int ligatureHorizon = 3;
    /// Candidate-pair limit above which matching falls back to greedy.
    long long matchCap = 20000000;
    bool weightedPrecision = false;

    /// Scale ceiling for a resolution mode: 41 for "half", 82 for "full".
    static int rmaxForResolution(const std::string& resolution);

    /// Keys in serialization order.
    static const std::vector<std::string>& keys();

    /// Sets one key from its text form; throws ConfigError on unknown keys or
    /// malformed values.
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;

    std::string serialize() const;
    /// Starts from defaults and applies every line. Blank lines and lines
    /// starting with '#' are skipped.
    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::filesystem::path& path);

    /// Throws ConfigError if any value is out of range.
    void validate() const;

    CostConfig costConfig() const;
    ShockConfig shockConfig() const;
    GrowthConfig growthConfig() const;
    L0Params smoothParams() const;
};

/// Environment variable naming a config file to use when none is given.
inline constexpr const char* kConfigEnvVar = "ASG_CONFIG";

}  // namespace asg
