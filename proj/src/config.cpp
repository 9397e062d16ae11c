#include <charconv>
#include <fstream>
#include <sstream>

#include "asg/config.hpp"

namespace asg {

namespace {

std::string formatDouble(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parseDouble(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw ConfigError("config key '" + key + "': not a number: '" + text + "'");
    return v;
}

template <typename Int>
Int parseInt(const std::string& key, const std::string& text) {
    Int v = 0;
    const char* end = text.data() + text.size();
    auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw ConfigError("config key '" + key + "': not an integer: '" + text + "'");
    return v;
}

bool parseBool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

int RunConfig::rmaxForResolution(const std::string& resolution) {
    if (resolution == "half") return 41;
    if (resolution == "full") return 82;
    throw ConfigError("resolution must be 'half' or 'full', got '" + resolution + "'");
}

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> k = {
        "cost",          "ws_color",      "ws_hist",          "rmin",         "rmax",
        "resolution",    "bins",          "tile_size",        "smooth",       "smooth_lambda",
        "smooth_kappa",  "smooth_beta_max", "delta_r",        "epsilon_r",    "alpha_c",
        "l_max",         "alpha_min",     "directions",       "relax_factor", "scale_step",
        "subsume_fraction", "subsume_margin", "junction_angle", "eval_tol",     "ligature_horizon", "match_cap",
        "weighted_precision",
    };
    return k;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    try {
        if (key == "cost") cost = parseCostKind(value);
        else if (key == "ws_color") wsColor = parseDouble(key, value);
        else if (key == "ws_hist") wsHist = parseDouble(key, value);
        else if (key == "rmin") rmin = parseInt<int>(key, value);
        else if (key == "rmax") rmax = parseInt<int>(key, value);
        else if (key == "resolution") {
            rmaxForResolution(value);
            resolution = value;
        }
        else if (key == "bins") bins = parseInt<int>(key, value);
        else if (key == "tile_size") tileSize = parseInt<int>(key, value);
        else if (key == "smooth") smooth = parseBool(key, value);
        else if (key == "smooth_lambda") smoothLambda = parseDouble(key, value);
        else if (key == "smooth_kappa") smoothKappa = parseDouble(key, value);
        else if (key == "smooth_beta_max") smoothBetaMax = parseDouble(key, value);
        else if (key == "delta_r") deltaR = parseDouble(key, value);
        else if (key == "epsilon_r") epsilonR = parseInt<int>(key, value);
        else if (key == "alpha_c") alphaC = parseDouble(key, value);
        else if (key == "l_max") lMax = parseInt<int>(key, value);
        else if (key == "alpha_min") alphaMin = parseDouble(key, value);
        else if (key == "directions") directions = parseInt<int>(key, value);
        else if (key == "relax_factor") relaxFactor = parseDouble(key, value);
        else if (key == "scale_step") scaleStep = parseInt<int>(key, value);
        else if (key == "subsume_fraction") subsumeFraction = parseDouble(key, value);
        else if (key == "subsume_margin") subsumeMargin = parseInt<int>(key, value);
        else if (key == "junction_angle") junctionAngle = parseDouble(key, value);
        else if (key == "eval_tol") evalTol = parseDouble(key, value);
        else if (key == "ligature_horizon") ligatureHorizon = parseInt<int>(key, value);
        else if (key == "match_cap") matchCap = parseInt<long long>(key, value);
        else if (key == "weighted_precision") weightedPrecision = parseBool(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

std::string RunConfig::get(const std::string& key) const {
    if (key == "cost") return toString(cost);
    if (key == "ws_color") return formatDouble(wsColor);
    if (key == "ws_hist") return formatDouble(wsHist);
    if (key == "rmin") return std::to_string(rmin);
    if (key == "rmax") return std::to_string(rmax);
    if (key == "resolution") return resolution;
    if (key == "bins") return std::to_string(bins);
    if (key == "tile_size") return std::to_string(tileSize);
    if (key == "smooth") return smooth ? "true" : "false";
    if (key == "smooth_lambda") return formatDouble(smoothLambda);
    if (key == "smooth_kappa") return formatDouble(smoothKappa);
    if (key == "smooth_beta_max") return formatDouble(smoothBetaMax);
    if (key == "delta_r") return formatDouble(deltaR);
    if (key == "epsilon_r") return std::to_string(epsilonR);
    if (key == "alpha_c") return formatDouble(alphaC);
    if (key == "l_max") return std::to_string(lMax);
    if (key == "alpha_min") return formatDouble(alphaMin);
    if (key == "directions") return std::to_string(directions);
    if (key == "relax_factor") return formatDouble(relaxFactor);
    if (key == "scale_step") return std::to_string(scaleStep);
    if (key == "subsume_fraction") return formatDouble(subsumeFraction);
    if (key == "subsume_margin") return std::to_string(subsumeMargin);
    if (key == "junction_angle") return formatDouble(junctionAngle);
    if (key == "eval_tol") return formatDouble(evalTol);
    if (key == "ligature_horizon") return std::to_string(ligatureHorizon);
    if (key == "match_cap") return std::to_string(matchCap);
    if (key == "weighted_precision") return weightedPrecision ? "true" : "false";
    throw ConfigError("unknown config key '" + key + "'");
}

std::string RunConfig::serialize() const {
    std::string out;
    for (const auto& k : keys()) out += k + "=" + get(k) + "\n";
    return out;
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineNo) + ": expected key=value");
        }
        try {
            cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(lineNo) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void RunConfig::validate() const {
    try {
        costConfig().validate();
        shockConfig().validate();
        growthConfig().validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    rmaxForResolution(resolution);
    if (smooth && (!(smoothLambda > 0.0) || !(smoothKappa > 1.0) || !(smoothBetaMax > 0.0))) {
        throw ConfigError("smoothing needs smooth_lambda > 0, smooth_kappa > 1, smooth_beta_max > 0");
    }
    if (!(evalTol >= 0.0)) throw ConfigError("eval_tol must be >= 0");
    if (ligatureHorizon < 1) throw ConfigError("ligature_horizon must be >= 1");
    if (matchCap < 0) throw ConfigError("match_cap must be >= 0");
}

CostConfig RunConfig::costConfig() const {
    CostConfig c;
    c.kind = cost;
    c.ws = cost == CostKind::Color ? wsColor : wsHist;
    c.rmin = rmin;
    c.rmax = rmax;
    c.bins = bins;
    c.tileSize = tileSize;
    return c;
}

ShockConfig RunConfig::shockConfig() const { return {deltaR, epsilonR}; }

GrowthConfig RunConfig::growthConfig() const {
    GrowthConfig g;
    g.alphaC = alphaC;
    g.lMax = lMax;
    g.alphaMin = alphaMin;
    g.directions = directions;
    g.relaxFactor = relaxFactor;
    g.scaleStep = scaleStep;
    g.subsumeFraction = subsumeFraction;
    g.subsumeMargin = subsumeMargin;
    g.junctionAngle = junctionAngle;
    return g;
}

L0Params RunConfig::smoothParams() const { return {smoothLambda, smoothKappa, smoothBetaMax}; }

}  // namespace asg
