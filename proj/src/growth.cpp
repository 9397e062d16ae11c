#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "asg/growth.hpp"

namespace asg {

void GrowthConfig::validate() const {
    if (!(alphaC > 0.0) || !std::isfinite(alphaC)) throw std::invalid_argument("alpha_c must be > 0");
    if (lMax < 1) throw std::invalid_argument("l_max must be >= 1");
    if (!(alphaMin > 0.0) || alphaMin > 1.0) throw std::invalid_argument("alpha_min must be in (0,1]");
    if (directions < 4 || directions % 4 != 0) throw std::invalid_argument("directions must be a positive multiple of 4");
    if (!(relaxFactor >= 1.0) || !std::isfinite(relaxFactor)) throw std::invalid_argument("relax_factor must be >= 1");
    if (scaleStep < 0) throw std::invalid_argument("scale_step must be >= 0");
    if (!(subsumeFraction > 0.0) || subsumeFraction > 1.0) throw std::invalid_argument("subsume_fraction must be in (0,1]");
    if (subsumeMargin < 0) throw std::invalid_argument("subsume_margin must be >= 0");
    if (!(junctionAngle >= 0.0) || junctionAngle >= 180.0) throw std::invalid_argument("junction_angle must be in [0,180)");
}

double GrowthConfig::alpha(int l) const {
    if (lMax <= 1) return 1.0;
    return 1.0 - (1.0 - alphaMin) * static_cast<double>(l - 1) / static_cast<double>(lMax - 1);
}

RayStep rayStep(int k, int directions) {
    const double theta = 2.0 * std::numbers::pi * k / directions;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double m = std::max(std::abs(c), std::abs(s));
    return {c / m, s / m};
}

Pixel rayPoint(Pixel anchor, int k, int j, int directions) {
    const RayStep st = rayStep(k, directions);
    return {anchor.x + static_cast<int>(std::lround(j * st.dx)), anchor.y + static_cast<int>(std::lround(j * st.dy))};
}

double directionAngle(int a, int b, int directions) {
    int d = std::abs(a - b) % directions;
    d = std::min(d, directions - d);
    return 360.0 * d / directions;
}

int nearestDirection(double dx, double dy, int directions) {
    const double step = 2.0 * std::numbers::pi / directions;
    int k = static_cast<int>(std::lround(std::atan2(dy, dx) / step));
    k %= directions;
    if (k < 0) k += directions;
    return k;
}

namespace {

constexpr double kAngleEps = 1e-9;

int chebyshev(Pixel a, Pixel b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

double vectorAngleDeg(double ax, double ay, double bx, double by) {
    const double d = std::abs(std::atan2(ay, ax) - std::atan2(by, bx));
    return std::min(d, 2.0 * std::numbers::pi - d) * 180.0 / std::numbers::pi;
}

class CostLookup {
public:
    CostLookup(const CostVolume& vol) : vol_(vol) {}

    double operator()(Pixel p, int r) {
        if (!vol_.inRange(p.x, p.y, r)) return kInvalidCost;
        const auto key = (static_cast<std::uint64_t>(r) * vol_.height() + p.y) * vol_.width() + p.x;
        auto [it, inserted] = seen_.try_emplace(key, 0.0);
        if (inserted) it->second = vol_.cost(p, r);
        return it->second;
    }
    std::uint64_t lookups() const { return seen_.size(); }

private:
    const CostVolume& vol_;
    std::unordered_map<std::uint64_t, double> seen_;
};

int subsumeRadius(int r, const GrowthConfig& cfg) { return std::max(0, r - cfg.subsumeMargin); }

// Pixels of a disk union, counted once each, for fractional subsumption.
class UnionCounter {
public:
    UnionCounter(const MedialAxis& axis) : axis_(axis) {
        static thread_local std::vector<std::uint32_t> stamps;
        static thread_local std::uint32_t counter = 0;
        const std::size_t n = static_cast<std::size_t>(axis.width()) * axis.height();
        if (stamps.size() != n) {
            stamps.assign(n, 0);
            counter = 0;
        }
        if (++counter == 0) {
            std::fill(stamps.begin(), stamps.end(), 0);
            counter = 1;
        }
        stamps_ = &stamps;
        stamp_ = counter;
    }

    void add(Pixel c, int r) {
        const DiskGeometry d(r);
        for (const Pixel& o : d.offsets()) {
            const int x = c.x + o.x;
            const int y = c.y + o.y;
            if (x < 0 || y < 0 || x >= axis_.width() || y >= axis_.height()) continue;
            auto& s = (*stamps_)[static_cast<std::size_t>(y) * axis_.width() + x];
            if (s == stamp_) continue;
            s = stamp_;
            ++total_;
            if (axis_.covered({x, y})) ++covered_;
        }
    }
    std::size_t total() const { return total_; }
    std::size_t covered() const { return covered_; }

private:
    const MedialAxis& axis_;
    std::vector<std::uint32_t>* stamps_;
    std::uint32_t stamp_;
    std::size_t total_ = 0;
    std::size_t covered_ = 0;
};

bool completesBlock(Pixel p, const MedialAxis& axis, const std::vector<FragmentPoint>& pts) {
    auto taken = [&](Pixel q) {
        if (axis.occupied(q)) return true;
        return std::any_of(pts.begin(), pts.end(), [q](const FragmentPoint& f) { return f.pos == q; });
    };
    for (int oy = -1; oy <= 0; ++oy) {
        for (int ox = -1; ox <= 0; ++ox) {
            int n = 0;
            for (int dy = 0; dy <= 1; ++dy) {
                for (int dx = 0; dx <= 1; ++dx) {
                    const Pixel q{p.x + ox + dx, p.y + oy + dy};
                    if (q == p) continue;
                    if (taken(q)) ++n;
                }
            }
            if (n == 3) return true;
        }
    }
    return false;
}

std::vector<Fragment> fragmentsImpl(int anchor, const MedialAxis& axis, const GrowthConfig& cfg, double ctol,
                                    AnchorMode mode, int incomingDir, CostLookup& lookup, const CostVolume& vol) {
    const MedialPoint& a = axis.point(anchor);
    std::vector<Pixel> nearby;  // axis points close to the anchor (spawn exclusions)
    if (mode == AnchorMode::Spawn) {
        for (int dy = -2; dy <= 2; ++dy) {
            for (int dx = -2; dx <= 2; ++dx) {
                if ((dx != 0 || dy != 0) && axis.occupied({a.pos.x + dx, a.pos.y + dy})) nearby.push_back({dx, dy});
            }
        }
    }

    std::vector<Fragment> out;
    std::vector<FragmentPoint> pts;
    for (int k = 0; k < cfg.directions; ++k) {
        if (incomingDir >= 0 && directionAngle(k, incomingDir, cfg.directions) > 90.0 + kAngleEps) continue;
        if (!nearby.empty()) {
            const RayStep st = rayStep(k, cfg.directions);
            const bool close = std::any_of(nearby.begin(), nearby.end(), [&](Pixel o) {
                return vectorAngleDeg(st.dx, st.dy, o.x, o.y) <= cfg.junctionAngle + kAngleEps;
            });
            if (close) continue;
        }

        pts.clear();
        bool joins = false;
        bool joinsOtherSeed = false;
        int rPrev = a.radius;
        for (int j = 1; j <= cfg.lMax; ++j) {
            const Pixel p = rayPoint(a.pos, k, j, cfg.directions);
            if (p.x < 0 || p.y < 0 || p.x >= axis.width() || p.y >= axis.height()) break;
            if (axis.occupied(p)) break;

            int bestR = 0;
            double bestC = kInvalidCost;
            for (int r = std::max(vol.rmin(), rPrev - cfg.scaleStep); r <= std::min(vol.rmax(), rPrev + cfg.scaleStep); ++r) {
                const double c = lookup(p, r);
                if (c < bestC) {
                    bestC = c;
                    bestR = r;
                }
            }
            if (bestC == kInvalidCost || bestC > ctol) break;

            bool stopAfter = false;
            bool violates = false;
            for (int dy = -1; dy <= 1 && !violates; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int q = axis.pointAt({p.x + dx, p.y + dy});
                    if (q < 0) continue;
                    const Pixel qp = axis.point(q).pos;
                    if (j == 1) {
                        const bool ok = mode == AnchorMode::Tip ? q == anchor : chebyshev(qp, a.pos) <= 2;
                        if (!ok) {
                            violates = true;
                            break;
                        }
                    } else if (chebyshev(qp, a.pos) <= 2) {
                        violates = true;
                        break;
                    } else {
                        stopAfter = true;
                        joinsOtherSeed = joinsOtherSeed || axis.point(q).seedId != a.seedId;
                    }
                }
            }
            if (violates) break;
            if (completesBlock(p, axis, pts)) break;

            pts.push_back({p, bestR, bestC});
            rPrev = bestR;
            if (stopAfter) {
                joins = true;
                break;
            }
        }
        if (pts.empty()) continue;

        // Subsumption per prefix.
        std::vector<char> subsumed(pts.size(), 0);
        if (cfg.subsumeFraction >= 1.0) {
            bool all = true;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                all = all && axis.diskCovered(pts[i].pos, subsumeRadius(pts[i].radius, cfg));
                subsumed[i] = all;
            }
        } else {
            UnionCounter u(axis);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                u.add(pts[i].pos, subsumeRadius(pts[i].radius, cfg));
                subsumed[i] = u.covered() >= cfg.subsumeFraction * static_cast<double>(u.total());
            }
        }

        // Union rule: a fragment linking to another seed's branch is kept even
        // when its disks add no coverage.
        const std::size_t linkLen = joins && joinsOtherSeed ? pts.size() : 0;

        double sum = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            sum += pts[i].cost;
            if (subsumed[i] && i + 1 != linkLen) continue;
            const int l = static_cast<int>(i) + 1;
            Fragment f;
            f.points.assign(pts.begin(), pts.begin() + l);
            f.direction = k;
            f.cost = cfg.alpha(l) / l * sum;
            f.joins = joins && i + 1 == pts.size();
            out.push_back(std::move(f));
        }
    }
    return out;
}

bool fansOut(const std::vector<Fragment>& frags, const GrowthConfig& cfg) {
    for (std::size_t i = 0; i < frags.size(); ++i) {
        for (std::size_t j = i + 1; j < frags.size(); ++j) {
            if (directionAngle(frags[i].direction, frags[j].direction, cfg.directions) > cfg.junctionAngle + kAngleEps) {
                return true;
            }
        }
    }
    return false;
}

bool isBranchTail(const MedialAxis& axis, int idx) {
    const auto& b = axis.branches()[static_cast<std::size_t>(axis.point(idx).branchId)];
    return !b.empty() && b.back() == idx;
}

int attach(MedialAxis& axis, const Fragment& f, int branch, int seedId, bool relaxed) {
    int last = -1;
    for (const auto& fp : f.points) {
        MedialPoint mp;
        mp.pos = fp.pos;
        mp.radius = fp.radius;
        mp.cost = fp.cost;
        mp.seedId = seedId;
        mp.incomingDir = f.direction;
        mp.flags = relaxed ? kRelaxedGrowth : 0;
        last = axis.addPoint(mp, branch);
    }
    ++axis.counters.fragmentsAttached;
    if (relaxed) ++axis.counters.relaxedFragments;
    return last;
}

// Direction pointing away from the branch at an end point.
int outwardDirection(const MedialAxis& axis, int idx, int directions) {
    const MedialPoint& p = axis.point(idx);
    if (p.incomingDir >= 0 && isBranchTail(axis, idx)) return p.incomingDir;
    const auto nb = axis.neighbors(p.pos);
    if (nb.size() != 1) return -1;
    const Pixel q = axis.point(nb.front()).pos;
    return nearestDirection(p.pos.x - q.x, p.pos.y - q.y, directions);
}

// Follows a tip until nothing attaches. Tips that could fork are pushed onto
// `forks` when given.
void growChain(int tip, int dir, int seedId, double ctol, bool relaxed, const CostVolume& vol, MedialAxis& axis,
               const GrowthConfig& cfg, CostLookup& lookup, std::vector<int>* forks) {
    while (true) {
        const auto frags = fragmentsImpl(tip, axis, cfg, ctol, AnchorMode::Tip, dir, lookup, vol);
        const int best = selectFragment(frags);
        if (best < 0) return;
        if (forks && fansOut(frags, cfg)) forks->push_back(tip);
        const Fragment& f = frags[static_cast<std::size_t>(best)];
        const int branch = isBranchTail(axis, tip) ? axis.point(tip).branchId : axis.addBranch();
        tip = attach(axis, f, branch, seedId, relaxed);
        dir = f.direction;
        if (f.joins) return;
    }
}

// Union rule across seeds: an end point whose disk overlaps another seed's
// origin disk is joined to that origin by a straight path, cost permitting.
// Subsumption is waived since such a path adds little coverage by construction.
bool linkToSeedOrigin(int tip, const CostVolume& vol, MedialAxis& axis, const GrowthConfig& cfg,
                      CostLookup& lookup) {
    const MedialPoint& t = axis.point(tip);
    int target = -1;
    long long bestD2 = 0;
    for (int i = 0; i < static_cast<int>(axis.size()); ++i) {
        const MedialPoint& q = axis.point(i);
        if (!(q.flags & kSeedOrigin) || q.seedId == t.seedId) continue;
        const int dx = t.pos.x - q.pos.x;
        const int dy = t.pos.y - q.pos.y;
        const long long d2 = static_cast<long long>(dx) * dx + static_cast<long long>(dy) * dy;
        const long long reach = q.radius + t.radius;
        if (d2 > reach * reach) continue;
        if (target < 0 || d2 < bestD2) {
            target = i;
            bestD2 = d2;
        }
    }
    if (target < 0) return false;

    const Pixel a = t.pos;
    const Pixel b = axis.point(target).pos;
    const int steps = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
    if (steps < 2) return false;
    const double ctol = axis.seedTolerance(t.seedId) * cfg.relaxFactor;
    std::vector<FragmentPoint> pts;
    int rPrev = t.radius;
    for (int j = 1; j < steps; ++j) {
        const Pixel p{a.x + static_cast<int>(std::lround(static_cast<double>(j) * (b.x - a.x) / steps)),
                      a.y + static_cast<int>(std::lround(static_cast<double>(j) * (b.y - a.y) / steps))};
        if (axis.occupied(p)) return false;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int q = axis.pointAt({p.x + dx, p.y + dy});
                if ((dx == 0 && dy == 0) || q < 0) continue;
                const bool prev = j == 1 ? q == tip : false;
                const bool next = j + 1 == steps && q == target;
                if (!prev && !next) return false;
            }
        }
        if (completesBlock(p, axis, pts)) return false;
        int bestR = 0;
        double bestC = kInvalidCost;
        for (int r = std::max(vol.rmin(), rPrev - cfg.scaleStep); r <= std::min(vol.rmax(), rPrev + cfg.scaleStep); ++r) {
            const double c = lookup(p, r);
            if (c < bestC) {
                bestC = c;
                bestR = r;
            }
        }
        if (bestC == kInvalidCost || bestC > ctol) return false;
        pts.push_back({p, bestR, bestC});
        rPrev = bestR;
    }

    Fragment f;
    f.points = std::move(pts);
    f.direction = nearestDirection(b.x - a.x, b.y - a.y, cfg.directions);
    f.joins = true;
    const int branch = isBranchTail(axis, tip) ? axis.point(tip).branchId : axis.addBranch();
    attach(axis, f, branch, axis.point(tip).seedId, true);
    return true;
}

}  // namespace

std::vector<Fragment> candidateFragments(int anchor, const CostVolume& vol, const MedialAxis& axis,
                                         const GrowthConfig& cfg, double ctol, AnchorMode mode, int incomingDir,
                                         ProposalLog* log) {
    CostLookup lookup(vol);
    auto out = fragmentsImpl(anchor, axis, cfg, ctol, mode, incomingDir, lookup, vol);
    if (log) log->lookups += lookup.lookups();
    return out;
}

int selectFragment(const std::vector<Fragment>& frags) {
    int best = -1;
    for (std::size_t i = 0; i < frags.size(); ++i) {
        if (best < 0) {
            best = static_cast<int>(i);
            continue;
        }
        const Fragment& a = frags[i];
        const Fragment& b = frags[static_cast<std::size_t>(best)];
        if (a.cost < b.cost || (a.cost == b.cost && (a.direction < b.direction ||
                                                    (a.direction == b.direction && a.length() > b.length())))) {
            best = static_cast<int>(i);
        }
    }
    return best;
}

bool detectJunction(int point, const MedialAxis& axis, const CostVolume& vol, const GrowthConfig& cfg) {
    const MedialPoint& p = axis.point(point);
    const double ctol = p.seedId >= 0 && static_cast<std::size_t>(p.seedId) < axis.seedCount()
                            ? axis.seedTolerance(p.seedId)
                            : p.cost * (1.0 + cfg.alphaC);
    const auto frags = candidateFragments(point, vol, axis, cfg, ctol, AnchorMode::Spawn, -1);
    return fansOut(frags, cfg);
}

int growSeed(const Seed& seed, const CostVolume& vol, MedialAxis& axis, const GrowthConfig& cfg) {
    const double ctol = seed.cost * (1.0 + cfg.alphaC);
    const int seedId = axis.registerSeed(ctol);
    if (axis.occupied(seed.pos)) return seedId;

    MedialPoint sp;
    sp.pos = seed.pos;
    sp.radius = seed.radius;
    sp.cost = seed.cost;
    sp.seedId = seedId;
    sp.flags = kSeedOrigin;
    const int seedIdx = axis.addPoint(sp, axis.addBranch());
    ++axis.counters.seedsGrown;

    CostLookup lookup(vol);
    std::vector<int> stack{seedIdx};
    while (!stack.empty()) {
        const int anchor = stack.back();
        stack.pop_back();
        const MedialPoint& a = axis.point(anchor);
        const bool fresh = axis.degree(a.pos) == 0;
        const auto frags = fragmentsImpl(anchor, axis, cfg, ctol, fresh ? AnchorMode::Tip : AnchorMode::Spawn, -1,
                                         lookup, vol);
        const int best = selectFragment(frags);
        if (best < 0) continue;
        const Fragment& f = frags[static_cast<std::size_t>(best)];
        const int branch = fresh && isBranchTail(axis, anchor) ? axis.point(anchor).branchId : axis.addBranch();
        const int tip = attach(axis, f, branch, seedId, false);
        // Try for more branches at this anchor once the current one is done.
        stack.push_back(anchor);
        if (!f.joins) growChain(tip, f.direction, seedId, ctol, false, vol, axis, cfg, lookup, &stack);
    }

    axis.counters.proposalsExamined += lookup.lookups();
    axis.counters.seedGrowthProposals += lookup.lookups();
    axis.refreshFlags();
    return seedId;
}

std::size_t pruneSeeds(SeedQueue& queue, const MedialAxis& axis, const GrowthConfig& cfg) {
    const std::size_t n = queue.removeIf([&](const Seed& s) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int q = axis.pointAt({s.pos.x + dx, s.pos.y + dy});
                if (q >= 0 && std::abs(axis.point(q).radius - s.radius) <= 1) return true;
            }
        }
        const int r = subsumeRadius(s.radius, cfg);
        if (cfg.subsumeFraction >= 1.0) return axis.diskCovered(s.pos, r);
        const DiskGeometry d(r);
        const std::size_t missing = axis.uncoveredInDisk(s.pos, r);
        return static_cast<double>(d.area() - missing) >= cfg.subsumeFraction * static_cast<double>(d.area());
    });
    return n;
}

void growEndPoints(const CostVolume& vol, MedialAxis& axis, const GrowthConfig& cfg) {
    CostLookup lookup(vol);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < static_cast<int>(axis.size()); ++i) {
            const MedialPoint& p = axis.point(i);
            if (axis.degree(p.pos) > 1 || p.seedId < 0) continue;
            const int seedId = p.seedId;
            const double ctol = axis.seedTolerance(seedId) * cfg.relaxFactor;
            const std::size_t before = axis.size();
            std::vector<int> forks;
            growChain(i, outwardDirection(axis, i, cfg.directions), seedId, ctol, true, vol, axis, cfg, lookup, &forks);
            while (!forks.empty()) {
                const int anchor = forks.back();
                forks.pop_back();
                const auto frags = fragmentsImpl(anchor, axis, cfg, ctol, AnchorMode::Spawn, -1, lookup, vol);
                const int best = selectFragment(frags);
                if (best < 0) continue;
                const Fragment& f = frags[static_cast<std::size_t>(best)];
                const int tip = attach(axis, f, axis.addBranch(), seedId, true);
                forks.push_back(anchor);
                if (!f.joins) growChain(tip, f.direction, seedId, ctol, true, vol, axis, cfg, lookup, &forks);
            }
            if (axis.size() != before) changed = true;
        }
    }
    for (int i = 0; i < static_cast<int>(axis.size()); ++i) {
        const MedialPoint& p = axis.point(i);
        if (axis.degree(p.pos) == 1 && p.seedId >= 0) linkToSeedOrigin(i, vol, axis, cfg, lookup);
    }
    axis.counters.proposalsExamined += lookup.lookups();
    axis.counters.endPointProposals += lookup.lookups();
    axis.refreshFlags();
}

}  // namespace asg
