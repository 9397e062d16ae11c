#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "asg/config.hpp"
#include "asg/eval.hpp"
#include "asg/extract.hpp"
#include "asg/imgproc.hpp"
#include "asg/synth.hpp"

namespace asg::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

/// IO and usage problems map to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes through a temporary sibling file and renames it into place.
void writeAtomic(const fs::path& path, const std::function<void(const fs::path&)>& write) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
    try {
        write(tmp);
        fs::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

void writeText(const fs::path& path, const std::string& text) {
    writeAtomic(path, [&](const fs::path& tmp) {
        std::ofstream out(tmp, std::ios::binary);
        out << text;
        out.close();
        if (!out) throw UsageError("cannot write " + tmp.string());
    });
}

void writeJson(const fs::path& path, const Json& j) { writeText(path, j.dump(2) + "\n"); }

Json configJson(const RunConfig& cfg) {
    Json j = Json::object();
    for (const auto& k : RunConfig::keys()) j[k] = cfg.get(k);
    return j;
}

std::string readFile(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// `--key value` flags for every RunConfig key, plus --config.
struct ConfigFlags {
    std::string configPath;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;

    void attach(CLI::App* app) {
        app->add_option("--config", configPath, "key=value config file (default: $" + std::string(kConfigEnvVar) + ")");
        for (const auto& k : RunConfig::keys()) {
            std::string names = "--" + k;
            std::string dashed = k;
            std::replace(dashed.begin(), dashed.end(), '_', '-');
            if (dashed != k) names += ",--" + dashed;
            options[k] = app->add_option(names, values[k], "config override")->group("Config keys");
        }
    }

    bool given(const std::string& key) const { return options.at(key)->count() > 0; }

    RunConfig resolve() const {
        RunConfig cfg;
        std::string path = configPath;
        if (path.empty()) {
            if (const char* env = std::getenv(kConfigEnvVar)) path = env;
        }
        if (!path.empty()) cfg = RunConfig::load(path);
        for (const auto& k : RunConfig::keys()) {
            if (given(k)) cfg.set(k, values.at(k));
        }
        if (given("resolution") && !given("rmax")) cfg.rmax = RunConfig::rmaxForResolution(cfg.resolution);
        cfg.validate();
        return cfg;
    }
};

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

RgbImage renderOverlay(const RgbImage& img, const MedialAxis& axis) {
    RgbImage out = img;
    const Vec3 red{1.0, 0.0, 0.0};
    const Vec3 yellow{1.0, 1.0, 0.0};
    for (const auto& p : axis.points()) out[p.pos] = red;
    for (const auto& p : axis.points()) {
        if (!p.has(kSeedOrigin) && !p.has(kJunction)) continue;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx != 0 && dy != 0) continue;
                const Pixel q{p.pos.x + dx, p.pos.y + dy};
                if (out.contains(q)) out[q] = yellow;
            }
        }
    }
    return out;
}

Json branchesJson(const MedialAxis& axis, const RunConfig& cfg) {
    Json branches = Json::array();
    for (std::size_t b = 0; b < axis.branches().size(); ++b) {
        Json pts = Json::array();
        for (int idx : axis.branches()[b]) {
            const auto& p = axis.point(idx);
            pts.push_back({{"x", p.pos.x},
                           {"y", p.pos.y},
                           {"r", p.radius},
                           {"cost", p.cost},
                           {"seed", p.seedId},
                           {"junction", p.has(kJunction)},
                           {"end_point", p.has(kEndPoint)},
                           {"relaxed", p.has(kRelaxedGrowth)}});
        }
        branches.push_back({{"id", b}, {"points", pts}});
    }
    std::size_t junctions = 0;
    for (const auto& p : axis.points()) junctions += p.has(kJunction) ? 1 : 0;
    Json j;
    j["width"] = axis.width();
    j["height"] = axis.height();
    j["point_count"] = axis.size();
    j["junction_count"] = junctions;
    j["branches"] = branches;
    j["config"] = configJson(cfg);
    return j;
}

Json countersJson(const fs::path& input, const ExtractionResult& res, const RunConfig& cfg) {
    const auto& c = res.axis.counters;
    std::size_t junctions = 0;
    for (const auto& p : res.axis.points()) junctions += p.has(kJunction) ? 1 : 0;
    Json j;
    j["input"] = input.string();
    j["width"] = res.volume.width();
    j["height"] = res.volume.height();
    j["cost"] = toString(res.volume.kind());
    j["scales"] = {res.volume.rmin(), res.volume.rmax()};
    j["requested_rmax"] = res.volume.requestedRmax;
    j["cost_evaluations"] = res.volume.evaluations;
    j["exhaustive_proposals"] = res.exhaustiveProposals;
    j["proposals_examined"] = c.proposalsExamined;
    j["seed_growth_proposals"] = c.seedGrowthProposals;
    j["end_point_proposals"] = c.endPointProposals;
    j["fragments_attached"] = c.fragmentsAttached;
    j["relaxed_fragments"] = c.relaxedFragments;
    j["seeds_extracted"] = res.seeds.size();
    j["seeds_grown"] = c.seedsGrown;
    j["seeds_pruned"] = c.seedsPruned;
    j["seeds_skipped"] = c.seedsSkipped;
    j["axis_points"] = res.axis.size();
    j["branches"] = res.axis.branches().size();
    j["junctions"] = junctions;
    j["timings"] = {{"proposal_generation", res.timings.proposalGeneration},
                    {"seed_growth", res.timings.seedGrowth},
                    {"end_point_growth", res.timings.endPointGrowth},
                    {"other", res.timings.other},
                    {"total", res.timings.total()}};
    j["warnings"] = res.warnings;
    j["config"] = configJson(cfg);
    return j;
}

int cmdExtract(const std::vector<std::string>& inputs, const fs::path& outDir, const RunConfig& cfg,
               const std::string& dumpCost, const std::string& dumpSeeds, std::ostream& out, std::ostream& err) {
    for (const auto& in : inputs) {
        if (!fs::is_regular_file(in)) throw UsageError("input not found: " + in);
    }
    int status = kExitOk;
    for (const auto& in : inputs) {
        const fs::path input(in);
        const fs::path dir = inputs.size() > 1 ? outDir / input.stem() : outDir;
        const RgbImage img = loadImage(input);
        ExtractionResult res;
        try {
            res = extract(img, cfg);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            err << "extraction failed for " << in << ": " << e.what() << "\n";
            status = kExitFailure;
            continue;
        }
        for (const auto& w : res.warnings) err << "warning: " << w << "\n";
        fs::create_directories(dir);
        writeAtomic(dir / "skeleton.png", [&](const fs::path& p) { savePng(p, res.axis.skeletonMask()); });
        writeAtomic(dir / "radius.png", [&](const fs::path& p) { savePng16(p, res.axis.radiusMap()); });
        writeAtomic(dir / "overlay.png", [&](const fs::path& p) { savePng(p, renderOverlay(img, res.axis)); });
        writeJson(dir / "branches.json", branchesJson(res.axis, cfg));
        writeJson(dir / "counters.json", countersJson(input, res, cfg));
        if (!dumpCost.empty()) {
            const fs::path p = inputs.size() > 1 ? dir / fs::path(dumpCost).filename() : fs::path(dumpCost);
            writeAtomic(p, [&](const fs::path& t) { saveCostVolume(t, res.volume); });
        }
        if (!dumpSeeds.empty()) {
            const fs::path p = inputs.size() > 1 ? dir / fs::path(dumpSeeds).filename() : fs::path(dumpSeeds);
            std::ostringstream ss;
            writeSeeds(ss, res.seeds);
            writeText(p, ss.str());
        }
        out << in << ": " << res.axis.size() << " axis points, " << res.axis.branches().size() << " branches, "
            << res.axis.counters.proposalsExamined << " proposals examined, " << std::fixed << std::setprecision(2)
            << res.timings.total() << " s\n";
        out.unsetf(std::ios::fixed);
    }
    return status;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct GtImage {
    std::string name;
    std::vector<Annotation> annotations;
    std::vector<int> indices;
};

GtImage loadGroundTruth(const fs::path& dir) {
    static const std::regex kSkel(R"(annotation_(\d+)\.png)");
    GtImage gt;
    gt.name = dir.filename().string();
    std::vector<int> ks;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string f = e.path().filename().string();
        if (std::regex_match(f, m, kSkel)) ks.push_back(std::stoi(m[1]));
    }
    std::sort(ks.begin(), ks.end());
    for (int k : ks) {
        Annotation a;
        a.skeleton = loadMask(dir / ("annotation_" + std::to_string(k) + ".png"));
        const fs::path rp = dir / ("annotation_" + std::to_string(k) + "_radius.png");
        if (fs::exists(rp)) {
            a.radius = loadGray16(rp);
            if (a.radius->width() != a.skeleton.width() || a.radius->height() != a.skeleton.height()) {
                throw ImageError("radius map size differs from annotation: " + rp.string());
            }
        }
        gt.annotations.push_back(std::move(a));
        gt.indices.push_back(k);
    }
    return gt;
}

std::optional<fs::path> findPrediction(const fs::path& predDir, const std::string& name) {
    for (const fs::path& p : {predDir / (name + ".png"), predDir / name / "skeleton.png"}) {
        if (fs::is_regular_file(p)) return p;
    }
    return std::nullopt;
}

Json annotationJson(int index, const AnnotationScore& s) {
    Json j{{"index", index},        {"precision", s.precision}, {"recall", s.recall},
           {"f1", s.f1},            {"tp_pred", s.tpPred},      {"tp_gt", s.tpGt},
           {"pred_count", s.predCount}, {"gt_count", s.gtCount}};
    if (s.weightedRecall) j["weighted_recall"] = *s.weightedRecall;
    if (s.weightedPrecision) j["weighted_precision"] = *s.weightedPrecision;
    return j;
}

struct Row {
    std::string name;
    double p = 0, r = 0, f = 0;
    std::optional<double> wp, wr, wf;
};

void printTable(std::ostream& out, const std::vector<Row>& rows, const Row& total, bool weighted) {
    std::size_t w = 9;
    for (const auto& r : rows) w = std::max(w, r.name.size());
    auto line = [&](const Row& r) {
        out << std::left << std::setw(static_cast<int>(w) + 2) << r.name << std::right << std::fixed
            << std::setprecision(3) << std::setw(7) << r.p << std::setw(7) << r.r << std::setw(7) << r.f;
        if (weighted) {
            out << std::setw(8) << *r.wr << std::setw(8) << *r.wf << std::showpos << std::setw(9) << (*r.wr - r.r)
                << std::setw(9) << (*r.wf - r.f) << std::noshowpos;
        }
        out << "\n";
    };
    out << std::left << std::setw(static_cast<int>(w) + 2) << "image" << std::right << std::setw(7) << "P"
        << std::setw(7) << "R" << std::setw(7) << "F1";
    if (weighted) out << std::setw(8) << "*R" << std::setw(8) << "*F1" << std::setw(9) << "*R gain" << std::setw(9) << "*F1 gain";
    out << "\n";
    for (const auto& r : rows) line(r);
    line(total);
    out.unsetf(std::ios::fixed);
}

int cmdEval(const fs::path& predDir, const fs::path& gtDir, const std::string& protocol, bool weighted,
            const std::string& jsonPath, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (protocol != "standard" && protocol != "single") throw UsageError("protocol must be 'standard' or 'single'");
    if (!fs::is_directory(predDir)) throw UsageError("prediction directory not found: " + predDir.string());
    if (!fs::is_directory(gtDir)) throw UsageError("ground-truth directory not found: " + gtDir.string());

    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(gtDir)) {
        if (e.is_directory()) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());

    Json images = Json::array();
    Json failures = Json::array();
    Json warnings = Json::array();
    std::vector<Row> rows;
    auto warn = [&](const std::string& msg) {
        err << "warning: " << msg << "\n";
        warnings.push_back(msg);
    };
    auto fail = [&](const std::string& name, const std::string& msg) {
        err << "error: " << name << ": " << msg << "\n";
        failures.push_back({{"name", name}, {"error", msg}});
    };

    for (const auto& dir : dirs) {
        const std::string name = dir.filename().string();
        GtImage gt;
        try {
            gt = loadGroundTruth(dir);
        } catch (const std::exception& e) {
            fail(name, e.what());
            continue;
        }
        if (gt.annotations.empty()) {
            fail(name, "no annotation_<k>.png files");
            continue;
        }
        const auto predPath = findPrediction(predDir, name);
        if (!predPath) {
            fail(name, "missing prediction");
            continue;
        }
        Mask pred;
        try {
            pred = loadMask(*predPath);
        } catch (const std::exception& e) {
            fail(name, e.what());
            continue;
        }
        bool sizesOk = true;
        for (const auto& a : gt.annotations) {
            sizesOk = sizesOk && a.skeleton.width() == pred.width() && a.skeleton.height() == pred.height();
        }
        if (!sizesOk) {
            fail(name, "prediction and annotation sizes differ");
            continue;
        }

        const double tol = toleranceForImage(pred.width(), pred.height(), cfg.evalTol);
        const EvalResult plain = protocol == "standard" ? scoreStandard(pred, gt.annotations, tol, cfg.matchCap)
                                                        : scoreSingleAnnotation(pred, gt.annotations, tol, cfg.matchCap);
        Row row{name, plain.precision, plain.recall, plain.f1, {}, {}, {}};
        Json img{{"name", name},
                 {"prediction", predPath->string()},
                 {"width", pred.width()},
                 {"height", pred.height()},
                 {"tolerance", tol},
                 {"precision", plain.precision},
                 {"recall", plain.recall},
                 {"f1", plain.f1}};
        if (plain.bestAnnotation >= 0) img["best_annotation"] = gt.indices[static_cast<std::size_t>(plain.bestAnnotation)];

        const EvalResult* detail = &plain;
        EvalResult weightedResult;
        if (weighted) {
            std::vector<Raster<double>> weights;
            for (std::size_t k = 0; k < gt.annotations.size(); ++k) {
                const auto& a = gt.annotations[k];
                if (a.radius) {
                    weights.push_back(ligatureWeights(a.skeleton, *a.radius, cfg.ligatureHorizon));
                } else {
                    warn(name + ": annotation_" + std::to_string(gt.indices[k]) +
                         " has no radius map; using unit weights");
                    weights.emplace_back(pred.width(), pred.height(), 1.0);
                }
            }
            weightedResult = scoreWeighted(pred, gt.annotations, weights, tol, protocol, cfg.weightedPrecision,
                                           cfg.matchCap);
            detail = &weightedResult;
            row.wp = weightedResult.precision;
            row.wr = weightedResult.recall;
            row.wf = weightedResult.f1;
            img["weighted"] = {{"precision", weightedResult.precision},
                               {"recall", weightedResult.recall},
                               {"f1", weightedResult.f1}};
            if (weightedResult.bestAnnotation >= 0) {
                img["weighted"]["best_annotation"] = gt.indices[static_cast<std::size_t>(weightedResult.bestAnnotation)];
            }
        }
        Json per = Json::array();
        for (std::size_t k = 0; k < detail->perAnnotation.size(); ++k) {
            per.push_back(annotationJson(gt.indices[k], detail->perAnnotation[k]));
        }
        img["annotations"] = per;
        images.push_back(img);
        rows.push_back(row);
    }

    // Dataset scores: mean P and R over images, F1 from the means.
    Row total{"aggregate", 0, 0, 0, {}, {}, {}};
    if (!rows.empty()) {
        double wp = 0, wr = 0;
        for (const auto& r : rows) {
            total.p += r.p;
            total.r += r.r;
            if (weighted) {
                wp += *r.wp;
                wr += *r.wr;
            }
        }
        const double n = static_cast<double>(rows.size());
        total.p /= n;
        total.r /= n;
        total.f = f1Score(total.p, total.r);
        if (weighted) {
            total.wp = wp / n;
            total.wr = wr / n;
            total.wf = f1Score(*total.wp, *total.wr);
        }
    } else if (weighted) {
        total.wp = total.wr = total.wf = 0.0;
    }

    Json report;
    report["protocol"] = protocol;
    report["weighted"] = weighted;
    report["tolerance_fraction"] = cfg.evalTol;
    report["images"] = images;
    report["failures"] = failures;
    report["aggregate"] = {{"images", rows.size()}, {"precision", total.p}, {"recall", total.r}, {"f1", total.f}};
    if (weighted) {
        report["aggregate"]["weighted"] = {{"precision", *total.wp}, {"recall", *total.wr}, {"f1", *total.wf}};
    }
    report["warnings"] = warnings;
    report["config"] = configJson(cfg);

    printTable(out, rows, total, weighted);
    if (!jsonPath.empty()) writeJson(jsonPath, report);
    return failures.empty() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

int cmdSynth(const std::vector<std::string>& specs, const fs::path& outDir, std::ostream& out) {
    for (const auto& s : specs) {
        const fs::path specPath(s);
        const std::string name = specPath.stem().string();
        ShapeSpec spec;
        try {
            spec = ShapeSpec::parse(readFile(specPath));
        } catch (const SpecError& e) {
            throw UsageError(specPath.string() + ": " + e.what());
        }
        Rendering r;
        try {
            r = renderShapes(spec);
        } catch (const SpecError& e) {
            throw UsageError(specPath.string() + ": " + e.what());
        }
        Mask fg(spec.width, spec.height, 0);
        for (const auto& m : r.masks) {
            for (std::size_t i = 0; i < m.size(); ++i) fg.data()[i] |= m.data()[i];
        }
        writeAtomic(outDir / "images" / (name + ".png"), [&](const fs::path& p) { savePng(p, r.image); });
        for (std::size_t i = 0; i < r.masks.size(); ++i) {
            writeAtomic(outDir / "masks" / name / ("region_" + std::to_string(i + 1) + ".png"),
                        [&](const fs::path& p) { savePng(p, r.masks[i]); });
        }
        writeAtomic(outDir / "masks" / name / "foreground.png", [&](const fs::path& p) { savePng(p, fg); });
        std::size_t skelPixels = 0;
        if (countSet(fg) > 0) {
            const OracleSkeleton oracle = oracleMAT(fg);
            skelPixels = countSet(oracle.skeleton);
            writeAtomic(outDir / "gt" / name / "annotation_1.png", [&](const fs::path& p) { savePng(p, oracle.skeleton); });
            writeAtomic(outDir / "gt" / name / "annotation_1_radius.png",
                        [&](const fs::path& p) { savePng16(p, oracle.radius); });
        }
        writeText(outDir / "specs" / (name + ".txt"), spec.serialize());
        out << name << ": " << spec.width << "x" << spec.height << ", " << spec.primitives.size()
            << " primitives, oracle skeleton " << skelPixels << " px\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

bool isImageFile(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".ppm";
}

int cmdBench(const fs::path& dir, const RunConfig& cfg, const std::string& jsonPath, std::ostream& out,
             std::ostream& err) {
    if (!fs::is_directory(dir)) throw UsageError("input directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && isImageFile(e.path())) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    StageTimings t;
    std::uint64_t examined = 0, exhaustive = 0, evaluations = 0;
    Json perImage = Json::array();
    int status = kExitOk;
    for (const auto& f : files) {
        const RgbImage img = loadImage(f);
        ExtractionResult res;
        try {
            res = extract(img, cfg);
        } catch (const std::exception& e) {
            err << "extraction failed for " << f.string() << ": " << e.what() << "\n";
            status = kExitFailure;
            continue;
        }
        t.proposalGeneration += res.timings.proposalGeneration;
        t.seedGrowth += res.timings.seedGrowth;
        t.endPointGrowth += res.timings.endPointGrowth;
        t.other += res.timings.other;
        examined += res.axis.counters.proposalsExamined;
        exhaustive += res.exhaustiveProposals;
        evaluations += res.volume.evaluations;
        perImage.push_back({{"image", f.filename().string()},
                            {"seconds", res.timings.total()},
                            {"proposals_examined", res.axis.counters.proposalsExamined},
                            {"exhaustive_proposals", res.exhaustiveProposals}});
    }

    if (perImage.empty()) {
        out << "no images in " << dir.string() << "\n";
    } else {
        const double total = t.total();
        const std::pair<const char*, double> stages[] = {{"Proposal Generation", t.proposalGeneration},
                                                         {"Seed Growth", t.seedGrowth},
                                                         {"End Point Growth", t.endPointGrowth},
                                                         {"Other", t.other}};
        out << std::left << std::setw(22) << "Stage" << std::right << std::setw(12) << "Seconds" << std::setw(9)
            << "Share" << "\n"
            << std::fixed;
        for (const auto& [label, secs] : stages) {
            out << std::left << std::setw(22) << label << std::right << std::setprecision(3) << std::setw(12) << secs
                << std::setprecision(1) << std::setw(8) << (total > 0 ? 100.0 * secs / total : 0.0) << "%\n";
        }
        out << std::left << std::setw(22) << "Total" << std::right << std::setprecision(3) << std::setw(12) << total
            << std::setprecision(1) << std::setw(8) << (total > 0 ? 100.0 : 0.0) << "%\n";
        out.unsetf(std::ios::fixed);
        out << "\nimages                " << perImage.size() << "\n"
            << "proposals examined    " << examined << "\n"
            << "exhaustive H*W*R      " << exhaustive << "\n"
            << "cost evaluations      " << evaluations << "\n";
        if (exhaustive > 0) {
            out << "examined / exhaustive " << std::fixed << std::setprecision(4)
                << static_cast<double>(examined) / static_cast<double>(exhaustive) << "\n";
            out.unsetf(std::ios::fixed);
        }
    }

    if (!jsonPath.empty()) {
        Json j;
        j["images"] = perImage;
        j["stages"] = {{"proposal_generation", t.proposalGeneration},
                       {"seed_growth", t.seedGrowth},
                       {"end_point_growth", t.endPointGrowth},
                       {"other", t.other},
                       {"total", t.total()}};
        j["proposals_examined"] = examined;
        j["exhaustive_proposals"] = exhaustive;
        j["cost_evaluations"] = evaluations;
        j["config"] = configJson(cfg);
        writeJson(jsonPath, j);
    }
    return status;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Unsupervised medial-axis extraction with the appearance shock grammar"};
    app.require_subcommand(1);

    ConfigFlags extractFlags, evalFlags, benchFlags;

    auto* ex = app.add_subcommand("extract", "Extract the medial axis of one or more images");
    std::vector<std::string> exInputs;
    std::string exOut, dumpCost, dumpSeeds;
    ex->add_option("input", exInputs, "Input image(s), PNG or PPM")->required();
    ex->add_option("-o,--out", exOut, "Output directory")->required();
    ex->add_option("--dump-cost", dumpCost, "Write the cost volume to this file");
    ex->add_option("--dump-seeds", dumpSeeds, "Write the extracted seeds to this file");
    extractFlags.attach(ex);

    auto* ev = app.add_subcommand("eval", "Score predicted skeletons against ground truth");
    std::string predDir, gtDir, protocol = "standard", evJson;
    bool weighted = false;
    ev->add_option("--pred", predDir, "Prediction directory (<name>.png or <name>/skeleton.png)")->required();
    ev->add_option("--gt", gtDir, "Ground-truth directory (<name>/annotation_<k>.png)")->required();
    ev->add_option("--protocol", protocol, "standard or single")->check(CLI::IsMember({"standard", "single"}));
    ev->add_flag("--weighted", weighted, "Also report ligature-weighted scores");
    ev->add_option("--json", evJson, "Write the JSON report here");
    evalFlags.attach(ev);

    auto* sy = app.add_subcommand("synth", "Render synthetic fixtures with oracle skeletons");
    std::vector<std::string> specs;
    std::string syOut;
    sy->add_option("spec", specs, "Shape spec file(s)")->required();
    sy->add_option("-o,--out", syOut, "Output directory")->required();

    auto* be = app.add_subcommand("bench", "Per-stage timings and proposal counters over a directory");
    std::string benchDir, benchJson;
    be->add_option("input", benchDir, "Directory of images")->required();
    be->add_option("--json", benchJson, "Write the JSON report here");
    benchFlags.attach(be);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*ex) return cmdExtract(exInputs, exOut, extractFlags.resolve(), dumpCost, dumpSeeds, out, err);
        if (*ev) return cmdEval(predDir, gtDir, protocol, weighted, evJson, evalFlags.resolve(), out, err);
        if (*sy) return cmdSynth(specs, syOut, out);
        if (*be) return cmdBench(benchDir, benchFlags.resolve(), benchJson, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ImageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace asg::cli
