#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "asg/imgproc.hpp"
#include "asg/shock.hpp"

namespace asg::test {

namespace fs = std::filesystem;

fs::path fixtureDir() { return fs::path(ASG_FIXTURE_DIR); }

ShapeSpec loadFixture(const std::string& name) {
    const fs::path p = fixtureDir() / (name + ".spec");
    std::ifstream in(p);
    if (!in) throw std::runtime_error("missing fixture " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ShapeSpec::parse(ss.str());
}

const std::vector<std::string>& geometryFixtures() {
    static const std::vector<std::string> names = {"rectangle", "disk", "plus", "dumbbell"};
    return names;
}

Mask foreground(const Rendering& r) {
    Mask fg(r.image.width(), r.image.height(), 0);
    for (const auto& m : r.masks) {
        for (std::size_t i = 0; i < m.size(); ++i) fg.data()[i] |= m.data()[i];
    }
    return fg;
}

RgbImage constantImage(int w, int h, const Vec3& c) { return RgbImage(w, h, c); }

RgbImage blockImage(int w, int h, int block, double jitter, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int bw = (w + block - 1) / block;
    const int bh = (h + block - 1) / block;
    std::vector<Vec3> colors(static_cast<std::size_t>(bw * bh));
    for (auto& c : colors) c = {u(rng), u(rng), u(rng)};
    RgbImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Vec3 c = colors[static_cast<std::size_t>((y / block) * bw + x / block)];
            for (auto& v : c) v = std::clamp(v + jitter * (2.0 * u(rng) - 1.0), 0.0, 1.0);
            img(x, y) = c;
        }
    }
    return img;
}

RgbImage noiseImage(int w, int h, std::uint64_t seed) { return blockImage(w, h, 1, 0.0, seed); }

namespace {

Vec3 meanFeature(const LabImage& lab, int x, int y, int r) {
    Vec3 s{0, 0, 0};
    int n = 0;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy > r * r) continue;
            const Vec3& v = lab(x + dx, y + dy);
            for (int c = 0; c < 3; ++c) s[c] += v[c] * kLabFeatureScale[c];
            ++n;
        }
    }
    for (auto& v : s) v /= n;
    return s;
}

int diskArea(int r) {
    int n = 0;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) n += dx * dx + dy * dy <= r * r ? 1 : 0;
    }
    return n;
}

// Calls f(xk, yk, l) for every sub-disk strictly enclosed in D(x,r).
void forEachSubDisk(int x, int y, int r, const std::function<void(int, int, int)>& f) {
    for (int l = kSubDiskMinRadius; l < r; ++l) {
        const int rho = r - l;
        for (int dy = -rho; dy <= rho; ++dy) {
            for (int dx = -rho; dx <= rho; ++dx) {
                if (dx * dx + dy * dy <= rho * rho) f(x + dx, y + dy, l);
            }
        }
    }
}

}  // namespace

double naiveColorCost(const LabImage& lab, int x, int y, int r, const CostConfig& cfg) {
    if (r < cfg.rmin || r > cfg.rmax || !DiskGeometry::fits(x, y, r, lab.width(), lab.height())) return kInvalidCost;
    const Vec3 f = meanFeature(lab, x, y, r);
    double c = 0.0;
    forEachSubDisk(x, y, r, [&](int xk, int yk, int l) {
        const Vec3 g = meanFeature(lab, xk, yk, l);
        for (int ch = 0; ch < 3; ++ch) c += (f[ch] - g[ch]) * (f[ch] - g[ch]);
    });
    return c / diskArea(r) + cfg.ws / r;
}

double naiveHistCost(const RgbImage& img, const TileGrid& grid, int x, int y, int r, const CostConfig& cfg) {
    if (r < cfg.rmin || r > cfg.rmax || !DiskGeometry::fits(x, y, r, img.width(), img.height())) return kInvalidCost;
    const auto h = diskHistogram(img, grid, {x, y}, r, cfg.bins);
    double c = 0.0;
    forEachSubDisk(x, y, r, [&](int xk, int yk, int l) {
        const auto g = diskHistogram(img, grid, {xk, yk}, l, cfg.bins);
        double d = 0.0;
        for (int ch = 0; ch < 3; ++ch) d += bhattacharyya(h.data() + ch * cfg.bins, g.data() + ch * cfg.bins, cfg.bins);
        c += d / 3.0;
    });
    return c / r + cfg.ws / r;
}

std::size_t kuhnMatching(const Mask& pred, const Mask& gt, double tol) {
    std::vector<Pixel> ps, gs;
    for (int y = 0; y < pred.height(); ++y) {
        for (int x = 0; x < pred.width(); ++x) {
            if (pred(x, y)) ps.push_back({x, y});
            if (gt(x, y)) gs.push_back({x, y});
        }
    }
    std::vector<std::vector<int>> adj(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = 0; j < gs.size(); ++j) {
            const double dx = ps[i].x - gs[j].x;
            const double dy = ps[i].y - gs[j].y;
            if (dx * dx + dy * dy <= tol * tol) adj[i].push_back(static_cast<int>(j));
        }
    }
    std::vector<int> owner(gs.size(), -1);
    std::vector<char> seen;
    std::function<bool(int)> augment = [&](int i) {
        for (int j : adj[static_cast<std::size_t>(i)]) {
            if (seen[static_cast<std::size_t>(j)]) continue;
            seen[static_cast<std::size_t>(j)] = 1;
            if (owner[static_cast<std::size_t>(j)] < 0 || augment(owner[static_cast<std::size_t>(j)])) {
                owner[static_cast<std::size_t>(j)] = i;
                return true;
            }
        }
        return false;
    };
    std::size_t n = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        seen.assign(gs.size(), 0);
        if (augment(static_cast<int>(i))) ++n;
    }
    return n;
}

std::vector<std::string> axisViolations(const MedialAxis& axis, const CostVolume& vol) {
    std::vector<std::string> out;
    auto where = [](const MedialPoint& p) {
        return "(" + std::to_string(p.pos.x) + "," + std::to_string(p.pos.y) + ")";
    };

    for (std::size_t b = 0; b < axis.branches().size(); ++b) {
        const auto& br = axis.branches()[b];
        if (br.empty()) continue;
        std::vector<char> reached(br.size(), 0);
        std::vector<std::size_t> stack{0};
        reached[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const Pixel a = axis.point(br[stack.back()]).pos;
            stack.pop_back();
            for (std::size_t k = 0; k < br.size(); ++k) {
                if (reached[k]) continue;
                const Pixel q = axis.point(br[k]).pos;
                if (std::abs(q.x - a.x) <= 1 && std::abs(q.y - a.y) <= 1) {
                    reached[k] = 1;
                    ++count;
                    stack.push_back(k);
                }
            }
        }
        if (count != br.size()) out.push_back("branch " + std::to_string(b) + " is not 8-connected");
    }

    for (const auto& p : axis.points()) {
        int deg = 0;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if ((dx || dy) && axis.occupied({p.pos.x + dx, p.pos.y + dy})) ++deg;
            }
        }
        if (!p.has(kJunction) && deg > 2) out.push_back("non-junction point " + where(p) + " has degree " + std::to_string(deg));
        if (p.has(kJunction) && deg < 3) out.push_back("junction point " + where(p) + " has degree " + std::to_string(deg));
        if (p.cost != vol.cost(p.pos, p.radius)) out.push_back("stored cost differs from the volume at " + where(p));
        if (!p.has(kRelaxedGrowth)) {
            if (p.seedId < 0 || static_cast<std::size_t>(p.seedId) >= axis.seedCount()) {
                out.push_back("point " + where(p) + " has no seed");
            } else if (!(p.cost <= axis.seedTolerance(p.seedId))) {
                out.push_back("point " + where(p) + " exceeds its seed tolerance");
            }
        }
    }

    Mask cover(axis.width(), axis.height(), 0);
    for (const auto& p : axis.points()) {
        const int r = p.radius;
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                if (dx * dx + dy * dy <= r * r && cover.contains(p.pos.x + dx, p.pos.y + dy)) cover(p.pos.x + dx, p.pos.y + dy) = 1;
            }
        }
    }
    if (!(cover == axis.coverage())) out.push_back("coverage map differs from the union of disks");
    return out;
}

std::vector<std::string> seedViolations(const std::vector<Seed>& seeds, const CostVolume& vol,
                                        const ShockConfig& cfg) {
    std::vector<std::string> out;
    // Lowest cost over scale-maximal radii at a pixel, +inf when none.
    auto bestCost = [&](int x, int y, int* radius) {
        double best = kInvalidCost;
        for (int r = vol.rmin(); r <= vol.rmax(); ++r) {
            const double c = vol.cost(x, y, r);
            if (c == kInvalidCost) continue;
            const double up = r + cfg.epsilonR <= vol.rmax() ? vol.cost(x, y, r + cfg.epsilonR) : kInvalidCost;
            if (c + cfg.deltaR < up && c < best) {
                best = c;
                if (radius) *radius = r;
            }
        }
        return best;
    };
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const Seed& s = seeds[i];
        const std::string tag = "seed (" + std::to_string(s.pos.x) + "," + std::to_string(s.pos.y) + ")";
        const double c = vol.cost(s.pos, s.radius);
        if (c != s.cost) out.push_back(tag + ": cost differs from the volume");
        const double up = s.radius + cfg.epsilonR <= vol.rmax() ? vol.cost(s.pos, s.radius + cfg.epsilonR) : kInvalidCost;
        if (!(c + cfg.deltaR < up)) out.push_back(tag + ": not scale maximal");
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (!dx && !dy) continue;
                if (c > bestCost(s.pos.x + dx, s.pos.y + dy, nullptr)) out.push_back(tag + ": not a local cost minimum");
            }
        }
        if (s.type != ShockType::Type3 && s.type != ShockType::Type4) out.push_back(tag + ": born with type 1 or 2");
        if (i > 0 && seedBefore(s, seeds[i - 1])) out.push_back(tag + ": out of queue order");
    }
    return out;
}

Fidelity fixtureFidelity(const ShapeSpec& spec, CostKind kind) {
    const Rendering r = renderShapes(spec);
    const Mask fg = foreground(r);
    const OracleSkeleton oracle = oracleMAT(fg);
    RunConfig cfg;
    cfg.cost = kind;
    const auto t0 = std::chrono::steady_clock::now();
    const ExtractionResult res = extract(r.image, cfg);
    Fidelity f;
    f.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Mask pred = res.axis.skeletonMask();
    for (std::size_t i = 0; i < pred.size(); ++i) pred.data()[i] &= fg.data()[i];
    Mask gt = oracle.skeleton;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (oracle.radius.data()[i] < cfg.rmin) gt.data()[i] = 0;
    }
    const EvalResult e = scoreStandard(pred, {Annotation{gt, {}}}, toleranceForImage(spec.width, spec.height, cfg.evalTol));
    f.precision = e.precision;
    f.recall = e.recall;
    f.f1 = e.f1;
    f.predPixels = countSet(pred);
    f.gtPixels = countSet(gt);
    return f;
}

ConflictFixture conflictFixture() {
    ConflictFixture f{Mask(64, 64, 0), Mask(64, 64, 0)};
    for (int x = 8; x < 56; ++x) f.a(x, 20) = 1;
    for (int y = 30; y < 60; ++y) f.b(40, y) = 1;
    return f;
}

}  // namespace asg::test
