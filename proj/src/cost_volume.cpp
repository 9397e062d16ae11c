#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "asg/cost.hpp"

namespace asg {

const char* toString(CostKind kind) { return kind == CostKind::Color ? "color" : "hist"; }

CostKind parseCostKind(const std::string& text) {
    if (text == "color") return CostKind::Color;
    if (text == "hist") return CostKind::Hist;
    throw std::invalid_argument("unknown cost kind '" + text + "' (expected color or hist)");
}

void CostConfig::validate() const {
    if (rmin < 2) throw std::invalid_argument("rmin must be >= 2");
    if (rmax < rmin) throw std::invalid_argument("rmax must be >= rmin");
    if (!(ws > 0.0) || !std::isfinite(ws)) throw std::invalid_argument("ws must be positive and finite");
    if (bins < 1) throw std::invalid_argument("bins must be >= 1");
    if (tileSize < 1) throw std::invalid_argument("tile_size must be >= 1");
}

// ---------------------------------------------------------------------------
// Color
// ---------------------------------------------------------------------------

// All disk sums go through per-row prefix sums: a row of width W has W+1
// prefix entries, and a digital disk is 2r+1 row segments.
struct ColorCostModel::Impl {
    int width;
    int height;
    CostConfig cfg;
    int maxRadius;
    DiskTable disks;
    // Scaled Lab relative to pixel (0,0), 3 channels interleaved.
    std::vector<double> labPrefix;
    // Per level l in [kSubDiskMinRadius, maxRadius-1]: prefix sums of the mean feature F_l
    // (3 channels) and of |F_l|^2, 4 values interleaved per entry.
    std::vector<double> levelPrefix;

    Impl(const LabImage& lab, const CostConfig& c, int maxR)
        : width(lab.width()), height(lab.height()), cfg(c), maxRadius(maxR), disks(std::max(maxR, 0)) {
        const std::size_t rowLen = static_cast<std::size_t>(width + 1);
        labPrefix.assign(rowLen * height * 3, 0.0);
        const Vec3 ref = lab.empty() ? Vec3{0, 0, 0} : lab(0, 0);
        for (int y = 0; y < height; ++y) {
            double* row = &labPrefix[rowLen * y * 3];
            for (int x = 0; x < width; ++x) {
                for (int ch = 0; ch < 3; ++ch) row[(x + 1) * 3 + ch] = row[x * 3 + ch] + (lab(x, y)[ch] - ref[ch]) * kLabFeatureScale[ch];
            }
        }
        const int levels = std::max(0, maxRadius - kSubDiskMinRadius);
        levelPrefix.assign(static_cast<std::size_t>(levels) * rowLen * height * 4, 0.0);
        for (int l = kSubDiskMinRadius; l < maxRadius; ++l) {
            const double invArea = 1.0 / static_cast<double>(disks[l].area());
            for (int y = l; y + l < height; ++y) {
                double* row = levelRow(l, y);
                for (int x = 0; x < width; ++x) {
                    double f[4] = {0, 0, 0, 0};
                    if (x >= l && x + l < width) {
                        const Vec3 s = labDiskSum(x, y, l);
                        for (int ch = 0; ch < 3; ++ch) f[ch] = s[ch] * invArea;
                        f[3] = f[0] * f[0] + f[1] * f[1] + f[2] * f[2];
                    }
                    for (int ch = 0; ch < 4; ++ch) row[(x + 1) * 4 + ch] = row[x * 4 + ch] + f[ch];
                }
            }
        }
    }

    double* levelRow(int l, int y) {
        const std::size_t rowLen = static_cast<std::size_t>(width + 1);
        return &levelPrefix[((static_cast<std::size_t>(l - kSubDiskMinRadius) * height + y) * rowLen) * 4];
    }
    const double* levelRow(int l, int y) const { return const_cast<Impl*>(this)->levelRow(l, y); }

    Vec3 labDiskSum(int x, int y, int r) const {
        const std::size_t rowLen = static_cast<std::size_t>(width + 1);
        const DiskGeometry& d = disks[r];
        Vec3 s{0, 0, 0};
        for (int dy = -r; dy <= r; ++dy) {
            const int hw = d.halfWidth(dy);
            const double* row = &labPrefix[rowLen * (y + dy) * 3];
            for (int ch = 0; ch < 3; ++ch) s[ch] += row[(x + hw + 1) * 3 + ch] - row[(x - hw) * 3 + ch];
        }
        return s;
    }

    bool usable(int x, int y, int r) const {
        return r >= cfg.rmin && r <= maxRadius && DiskGeometry::fits(x, y, r, width, height);
    }

    Vec3 mean(int x, int y, int r) const {
        const Vec3 s = labDiskSum(x, y, r);
        const double inv = 1.0 / static_cast<double>(disks[r].area());
        return {s[0] * inv, s[1] * inv, s[2] * inv};
    }

    double cost(int x, int y, int r) const {
        if (!usable(x, y, r)) return kInvalidCost;
        const Vec3 f = mean(x, y, r);
        const double f2 = f[0] * f[0] + f[1] * f[1] + f[2] * f[2];
        double c = 0.0;
        for (int l = kSubDiskMinRadius; l < r; ++l) {
            const int rho = r - l;
            const DiskGeometry& d = disks[rho];
            double acc[4] = {0, 0, 0, 0};
            for (int dy = -rho; dy <= rho; ++dy) {
                const int hw = d.halfWidth(dy);
                const double* row = levelRow(l, y + dy);
                const double* hi = row + (x + hw + 1) * 4;
                const double* lo = row + (x - hw) * 4;
                for (int ch = 0; ch < 4; ++ch) acc[ch] += hi[ch] - lo[ch];
            }
            c += static_cast<double>(d.area()) * f2 - 2.0 * (f[0] * acc[0] + f[1] * acc[1] + f[2] * acc[2]) + acc[3];
        }
        if (c < 0.0) c = 0.0;
        return c / static_cast<double>(disks[r].area()) + cfg.ws / r;
    }
};

ColorCostModel::ColorCostModel(const LabImage& lab, const CostConfig& cfg, int maxRadius)
    : impl_(std::make_unique<Impl>(lab, cfg, maxRadius)) {}
ColorCostModel::~ColorCostModel() = default;
ColorCostModel::ColorCostModel(ColorCostModel&&) noexcept = default;
ColorCostModel& ColorCostModel::operator=(ColorCostModel&&) noexcept = default;

double ColorCostModel::cost(int x, int y, int r) const { return impl_->cost(x, y, r); }

Vec3 ColorCostModel::meanFeature(int x, int y, int r) const {
    if (r < 0 || r > impl_->maxRadius || !DiskGeometry::fits(x, y, r, impl_->width, impl_->height)) {
        throw std::out_of_range("meanFeature: disk outside image");
    }
    return impl_->mean(x, y, r);
}

// ---------------------------------------------------------------------------
// Histogram
// ---------------------------------------------------------------------------

// Every disk (x,l) gets the id of its interned histogram. Distances only
// touch bins occupied in both histograms, in bin order, which matches the
// dense sum exactly, and are memoized per channel.
struct HistCostModel::Impl {
    int width;
    int height;
    CostConfig cfg;
    int maxRadius;
    DiskTable disks;
    int histLen;  // 3 * bins

    // Joint histograms are triples of interned channel histograms.
    std::unordered_map<std::string, int> index;
    std::vector<std::array<int, 3>> channels;

    // Occupied bins of channel histogram c: binIndex/binCount[binStart[c] .. binStart[c+1]).
    std::unordered_map<std::string, int> chIndex;
    std::vector<int> binStart{0};
    std::vector<int> binIndex;
    std::vector<double> binCount;
    std::vector<double> sums;
    std::vector<std::uint16_t> chKey;

    // Per row (l - kSubDiskMinRadius) * height + y: runs of equal ids over the
    // valid x range, runs[rowStart[row] ..], closed by a sentinel at x0 = width.
    // runIndex holds, per pixel, the run containing it relative to rowStart.
    struct Run {
        int x0;
        int id;
    };
    std::vector<Run> runs;
    std::vector<std::size_t> rowStart;
    std::vector<std::uint16_t> runIndex;

    // Memo entries hold distances to memoOwner (whole and per channel); valid
    // while the center histogram repeats.
    mutable std::vector<double> memo;
    mutable std::vector<std::uint64_t> memoStamp;
    mutable std::array<std::vector<double>, 3> chMemo;
    mutable std::array<std::vector<std::uint64_t>, 3> chMemoStamp;
    mutable std::uint64_t stamp = 0;
    mutable int memoOwner = -1;
    mutable std::array<std::uint64_t, 3> chStamp{};
    mutable std::array<int, 3> chOwner{-1, -1, -1};

    Impl(const RgbImage& img, const TileGrid& grid, const CostConfig& c, int maxR)
        : width(img.width()), height(img.height()), cfg(c), maxRadius(maxR), disks(std::max(maxR, 0)),
          histLen(3 * c.bins) {
        const int levels = std::max(0, maxRadius - kSubDiskMinRadius + 1);
        if (width > 65536) throw std::invalid_argument("histogram cost: image wider than 65536 pixels");
        rowStart.assign(static_cast<std::size_t>(levels) * height, 0);
        runIndex.assign(static_cast<std::size_t>(levels) * height * width, 0);

        std::vector<double> tileCx(static_cast<std::size_t>(grid.cols()));
        for (int col = 0; col < grid.cols(); ++col) tileCx[static_cast<std::size_t>(col)] = grid.centerX(col);

        std::vector<std::uint16_t> h(static_cast<std::size_t>(histLen));
        std::vector<int> sig;
        std::vector<int> prevSig;
        for (int l = kSubDiskMinRadius; l <= maxRadius; ++l) {
            const double reach = l - grid.tileSize() * std::sqrt(2.0) / 2.0;
            for (int y = l; y + l < height; ++y) {
                const std::size_t rowKey = static_cast<std::size_t>(l - kSubDiskMinRadius) * height + y;
                rowStart[rowKey] = runs.size();
                std::uint16_t* rowIndex = &runIndex[rowKey * width];
                int prevId = -1;
                bool prevTiles = false;
                prevSig.clear();
                for (int x = l; x + l < width; ++x) {
                    // Signature: (row, colLo, colHi) per tile row with enclosed tiles.
                    sig.clear();
                    if (reach >= 0.0) {
                        for (int row = 0; row < grid.rows(); ++row) {
                            const double dy = grid.centerY(row) - y;
                            const double rem = reach * reach - dy * dy;
                            if (rem < 0.0) continue;
                            const double w = std::sqrt(rem);
                            // Exact test on squared distance at the candidate bounds.
                            auto lo = std::lower_bound(tileCx.begin(), tileCx.end(), x - w - 1.0) - tileCx.begin();
                            auto hi = std::upper_bound(tileCx.begin(), tileCx.end(), x + w + 1.0) - tileCx.begin();
                            int first = -1;
                            int last = -1;
                            for (auto col = lo; col < hi; ++col) {
                                const double dx = tileCx[static_cast<std::size_t>(col)] - x;
                                if (dx * dx + dy * dy <= reach * reach) {
                                    if (first < 0) first = static_cast<int>(col);
                                    last = static_cast<int>(col);
                                }
                            }
                            if (first >= 0) {
                                sig.push_back(row);
                                sig.push_back(first);
                                sig.push_back(last);
                            }
                        }
                    }
                    const bool hasTiles = !sig.empty();
                    int id;
                    if (hasTiles && prevTiles && sig == prevSig) {
                        id = prevId;
                    } else {
                        std::fill(h.begin(), h.end(), 0);
                        if (hasTiles) {
                            for (std::size_t k = 0; k < sig.size(); k += 3) {
                                for (int col = sig[k + 1]; col <= sig[k + 2]; ++col) {
                                    const Vec3& m = grid.mean(sig[k], col);
                                    for (int ch = 0; ch < 3; ++ch) {
                                        ++h[static_cast<std::size_t>(ch * cfg.bins + histogramBin(m[ch], cfg.bins))];
                                    }
                                }
                            }
                        } else {
                            for (const Pixel& o : disks[l].offsets()) {
                                const Vec3& v = img(x + o.x, y + o.y);
                                for (int ch = 0; ch < 3; ++ch) {
                                    ++h[static_cast<std::size_t>(ch * cfg.bins + histogramBin(v[ch], cfg.bins))];
                                }
                            }
                        }
                        id = intern(h);
                    }
                    if (runs.size() == rowStart[rowKey] || runs.back().id != id) runs.push_back({x, id});
                    rowIndex[x] = static_cast<std::uint16_t>(runs.size() - 1 - rowStart[rowKey]);
                    prevId = id;
                    prevTiles = hasTiles;
                    std::swap(prevSig, sig);
                }
                runs.push_back({width, -1});
            }
        }
        memo.assign(index.size(), 0.0);
        memoStamp.assign(memo.size(), 0);
        for (int c = 0; c < 3; ++c) {
            chMemo[static_cast<std::size_t>(c)].assign(chIndex.size(), 0.0);
            chMemoStamp[static_cast<std::size_t>(c)].assign(chIndex.size(), 0);
        }
    }

    int internChannel(const std::uint16_t* h) {
        // A single occupied bin gives the same distances whatever its count,
        // so such histograms share one canonical entry.
        int occupied = 0;
        for (int k = 0; k < cfg.bins; ++k) occupied += h[k] ? 1 : 0;
        chKey.assign(h, h + cfg.bins);
        if (occupied == 1) {
            for (auto& v : chKey) v = v ? 1 : 0;
        }
        std::string key(reinterpret_cast<const char*>(chKey.data()), chKey.size() * sizeof(std::uint16_t));
        auto [it, inserted] = chIndex.emplace(std::move(key), static_cast<int>(chIndex.size()));
        if (inserted) {
            double sum = 0.0;
            for (int k = 0; k < cfg.bins; ++k) {
                if (!chKey[static_cast<std::size_t>(k)]) continue;
                binIndex.push_back(k);
                binCount.push_back(chKey[static_cast<std::size_t>(k)]);
                sum += chKey[static_cast<std::size_t>(k)];
            }
            binStart.push_back(static_cast<int>(binIndex.size()));
            sums.push_back(sum);
        }
        return it->second;
    }

    int intern(const std::vector<std::uint16_t>& h) {
        std::array<int, 3> ch{};
        for (int c = 0; c < 3; ++c) ch[static_cast<std::size_t>(c)] = internChannel(h.data() + c * cfg.bins);
        std::string key(reinterpret_cast<const char*>(ch.data()), sizeof(ch));
        auto [it, inserted] = index.emplace(std::move(key), static_cast<int>(index.size()));
        if (inserted) channels.push_back(ch);
        return it->second;
    }

    double channelDistance(int a, int b) const {
        int i = binStart[static_cast<std::size_t>(a)];
        int j = binStart[static_cast<std::size_t>(b)];
        const int iEnd = binStart[static_cast<std::size_t>(a) + 1];
        const int jEnd = binStart[static_cast<std::size_t>(b) + 1];
        double overlap = 0.0;
        while (i < iEnd && j < jEnd) {
            if (binIndex[i] < binIndex[j]) {
                ++i;
            } else if (binIndex[j] < binIndex[i]) {
                ++j;
            } else {
                overlap += std::sqrt(binCount[i++] * binCount[j++]);
            }
        }
        const double v = 1.0 - overlap / std::sqrt(sums[static_cast<std::size_t>(a)] * sums[static_cast<std::size_t>(b)]);
        return v > 0.0 ? std::sqrt(v) : 0.0;
    }

    int idAt(int l, int x, int y) const {
        const std::size_t rowKey = static_cast<std::size_t>(l - kSubDiskMinRadius) * height + y;
        return runs[rowStart[rowKey] + runIndex[rowKey * width + x]].id;
    }

    double cost(int x, int y, int r) const {
        if (r < cfg.rmin || r > maxRadius || !DiskGeometry::fits(x, y, r, width, height)) return kInvalidCost;
        const int h0 = idAt(r, x, y);
        if (memoOwner != h0) {
            ++stamp;
            memoOwner = h0;
        }
        const std::array<int, 3>& c0 = channels[static_cast<std::size_t>(h0)];
        for (std::size_t c = 0; c < 3; ++c) {
            if (chOwner[c] != c0[c]) {
                ++chStamp[c];
                chOwner[c] = c0[c];
            }
        }
        auto dist = [&](int id) {
            const auto k = static_cast<std::size_t>(id);
            if (memoStamp[k] != stamp) {
                double d = 0.0;
                for (std::size_t c = 0; c < 3; ++c) {
                    const auto ck = static_cast<std::size_t>(channels[k][c]);
                    if (chMemoStamp[c][ck] != chStamp[c]) {
                        chMemoStamp[c][ck] = chStamp[c];
                        chMemo[c][ck] = channelDistance(c0[c], channels[k][c]);
                    }
                    d += chMemo[c][ck];
                }
                memoStamp[k] = stamp;
                memo[k] = d / 3.0;
            }
            return memo[k];
        };
        double c = 0.0;
        for (int l = kSubDiskMinRadius; l < r; ++l) {
            const int rho = r - l;
            const DiskGeometry& d = disks[rho];
            const std::size_t levelKey = static_cast<std::size_t>(l - kSubDiskMinRadius) * height;
            for (int dy = -rho; dy <= rho; ++dy) {
                const int hw = d.halfWidth(dy);
                const std::size_t rowKey = levelKey + static_cast<std::size_t>(y + dy);
                const int xb = x + hw;
                int xa = x - hw;
                const Run* run = &runs[rowStart[rowKey] + runIndex[rowKey * width + static_cast<std::size_t>(xa)]];
                while (true) {
                    const int next = run[1].x0;
                    c += (std::min(next - 1, xb) - xa + 1) * dist(run->id);
                    if (next > xb) break;
                    xa = next;
                    ++run;
                }
            }
        }
        return c / r + cfg.ws / r;
    }
};

HistCostModel::HistCostModel(const RgbImage& img, const TileGrid& grid, const CostConfig& cfg, int maxRadius)
    : impl_(std::make_unique<Impl>(img, grid, cfg, maxRadius)) {}
HistCostModel::~HistCostModel() = default;
HistCostModel::HistCostModel(HistCostModel&&) noexcept = default;
HistCostModel& HistCostModel::operator=(HistCostModel&&) noexcept = default;

double HistCostModel::cost(int x, int y, int r) const { return impl_->cost(x, y, r); }
std::size_t HistCostModel::distinctHistograms() const { return impl_->index.size(); }

double colorCost(const LabImage& lab, Pixel x, int r, const CostConfig& cfg) {
    if (r < cfg.rmin || r > cfg.rmax || !DiskGeometry::fits(x.x, x.y, r, lab.width(), lab.height())) {
        return kInvalidCost;
    }
    // The cost only looks inside D(x,r), so a (2r+1)^2 crop is enough.
    LabImage crop(2 * r + 1, 2 * r + 1);
    for (int y = 0; y < crop.height(); ++y) {
        for (int xx = 0; xx < crop.width(); ++xx) crop(xx, y) = lab(x.x - r + xx, x.y - r + y);
    }
    ColorCostModel model(crop, cfg, r);
    return model.cost(r, r, r);
}

double histCost(const TileGrid& grid, const RgbImage& img, Pixel x, int r, const CostConfig& cfg) {
    if (r < cfg.rmin || r > cfg.rmax || !DiskGeometry::fits(x.x, x.y, r, img.width(), img.height())) {
        return kInvalidCost;
    }
    HistCostModel model(img, grid, cfg, r);
    return model.cost(x.x, x.y, r);
}

// ---------------------------------------------------------------------------
// Volume
// ---------------------------------------------------------------------------

CostVolume::CostVolume(int width, int height, int rmin, int rmax, CostKind kind)
    : width_(width), height_(height), rmin_(rmin), rmax_(rmax), kind_(kind) {
    if (width < 0 || height < 0) throw std::invalid_argument("negative cost volume size");
    costs_.assign(static_cast<std::size_t>(numScales()) * width * height, kInvalidCost);
    requestedRmax = rmax;
}

std::size_t CostVolume::validCount() const {
    return static_cast<std::size_t>(std::count_if(costs_.begin(), costs_.end(), [](double c) { return c != kInvalidCost; }));
}

CostVolume buildCostVolume(const RgbImage& img, const CostConfig& cfg) {
    cfg.validate();
    const int W = img.width();
    const int H = img.height();
    const int fitting = maxFittingRadius(W, H);
    const int rmax = std::min(cfg.rmax, fitting);
    CostVolume vol(W, H, cfg.rmin, std::max(rmax, cfg.rmin - 1), cfg.kind);
    vol.requestedRmax = cfg.rmax;
    if (rmax < cfg.rmax) {
        vol.warning = "rmax " + std::to_string(cfg.rmax) + " exceeds the largest disk that fits in a " +
                      std::to_string(W) + "x" + std::to_string(H) + " image; scales truncated to " +
                      (rmax >= cfg.rmin ? "[" + std::to_string(cfg.rmin) + "," + std::to_string(rmax) + "]"
                                        : std::string("an empty range"));
    }
    if (vol.numScales() == 0) return vol;

    auto fill = [&](const auto& model) {
        for (int r = vol.rmin(); r <= vol.rmax(); ++r) {
            for (int y = r; y + r < H; ++y) {
                for (int x = r; x + r < W; ++x) {
                    vol.set(x, y, r, model.cost(x, y, r));
                    ++vol.evaluations;
                }
            }
        }
    };
    if (cfg.kind == CostKind::Color) {
        fill(ColorCostModel(toLab(img), cfg, vol.rmax()));
    } else {
        fill(HistCostModel(img, buildTileGrid(img, cfg.tileSize), cfg, vol.rmax()));
    }
    return vol;
}

namespace {

constexpr char kMagic[4] = {'A', 'S', 'G', 'C'};
constexpr std::uint32_t kDumpVersion = 1;

template <typename T>
void writeValue(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T readValue(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("cost volume dump truncated");
    return v;
}

}  // namespace

void saveCostVolume(const std::filesystem::path& path, const CostVolume& vol) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(kMagic, 4);
    writeValue<std::uint32_t>(out, kDumpVersion);
    writeValue<std::int32_t>(out, vol.width());
    writeValue<std::int32_t>(out, vol.height());
    writeValue<std::int32_t>(out, vol.rmin());
    writeValue<std::int32_t>(out, vol.rmax());
    writeValue<std::uint32_t>(out, vol.kind() == CostKind::Color ? 0u : 1u);
    std::vector<float> buf(vol.data().size());
    std::transform(vol.data().begin(), vol.data().end(), buf.begin(), [](double c) { return static_cast<float>(c); });
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

CostVolume loadCostVolume(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error(path.string() + " is not a cost volume dump");
    if (readValue<std::uint32_t>(in) != kDumpVersion) throw std::runtime_error("unsupported cost volume dump version");
    const int W = readValue<std::int32_t>(in);
    const int H = readValue<std::int32_t>(in);
    const int rmin = readValue<std::int32_t>(in);
    const int rmax = readValue<std::int32_t>(in);
    const auto kind = readValue<std::uint32_t>(in);
    if (W < 0 || H < 0 || kind > 1) throw std::runtime_error("corrupt cost volume header");
    CostVolume vol(W, H, rmin, rmax, kind == 0 ? CostKind::Color : CostKind::Hist);
    std::vector<float> buf(vol.slots());
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw std::runtime_error("cost volume dump truncated");
    for (int r = rmin; r <= rmax; ++r) {
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                vol.set(x, y, r, buf[(static_cast<std::size_t>(r - rmin) * H + y) * W + x]);
            }
        }
    }
    return vol;
}

}  // namespace asg
