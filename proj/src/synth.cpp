#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "asg/cost.hpp"
#include "asg/imgproc.hpp"
#include "asg/synth.hpp"

namespace asg {

namespace {

struct KindInfo {
    PrimitiveKind kind;
    const char* name;
    std::size_t params;
};

constexpr KindInfo kKinds[] = {
    {PrimitiveKind::Rect, "rect", 4},
    {PrimitiveKind::Disk, "disk", 3},
    {PrimitiveKind::Wedge, "wedge", 5},
    {PrimitiveKind::Plus, "plus", 4},
    {PrimitiveKind::Dumbbell, "dumbbell", 5},
};

const KindInfo& info(PrimitiveKind k) {
    for (const auto& i : kKinds) {
        if (i.kind == k) return i;
    }
    throw std::logic_error("unknown primitive kind");
}

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double number(const std::string& tok, int line) {
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    auto res = std::from_chars(tok.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        throw SpecError(line, "expected a number, got '" + tok + "'");
    }
    return v;
}

Vec3 color255(const std::vector<std::string>& tok, std::size_t at, int line) {
    if (tok.size() != at + 3) throw SpecError(line, "expected three color components");
    Vec3 c{};
    for (int i = 0; i < 3; ++i) {
        const double v = number(tok[at + static_cast<std::size_t>(i)], line);
        if (v < 0.0 || v > 255.0) throw SpecError(line, "color components must be in [0,255]");
        c[static_cast<std::size_t>(i)] = v / 255.0;
    }
    return c;
}

// Inside test plus analytic bounding box for each primitive.
struct Shape {
    const Primitive& p;

    bool inside(int x, int y) const {
        const auto& a = p.params;
        switch (p.kind) {
            case PrimitiveKind::Rect:
                return x >= a[0] && x < a[0] + a[2] && y >= a[1] && y < a[1] + a[3];
            case PrimitiveKind::Disk: {
                const double dx = x - a[0];
                const double dy = y - a[1];
                return dx * dx + dy * dy <= a[2] * a[2];
            }
            case PrimitiveKind::Wedge: {
                if (x < a[0] || x > a[0] + a[2] - 1) return false;
                const double t = a[2] > 1 ? (x - a[0]) / (a[2] - 1) : 0.0;
                const double h = a[3] + (a[4] - a[3]) * t;
                return 2.0 * std::abs(y - a[1]) <= h - 1.0;
            }
            case PrimitiveKind::Plus: {
                const double dx = std::abs(x - a[0]);
                const double dy = std::abs(y - a[1]);
                return (dx <= a[2] && 2.0 * dy <= a[3] - 1.0) || (dy <= a[2] && 2.0 * dx <= a[3] - 1.0);
            }
            case PrimitiveKind::Dumbbell: {
                const double r2 = a[3] * a[3];
                const double d1 = (x - a[0]) * (x - a[0]) + (y - a[2]) * (y - a[2]);
                const double d2 = (x - a[1]) * (x - a[1]) + (y - a[2]) * (y - a[2]);
                const bool bar = x >= a[0] && x <= a[1] && 2.0 * std::abs(y - a[2]) <= a[4] - 1.0;
                return d1 <= r2 || d2 <= r2 || bar;
            }
        }
        return false;
    }

    void bounds(int& x0, int& y0, int& x1, int& y1) const {
        const auto& a = p.params;
        auto fl = [](double v) { return static_cast<int>(std::floor(v)); };
        auto cl = [](double v) { return static_cast<int>(std::ceil(v)); };
        switch (p.kind) {
            case PrimitiveKind::Rect:
                x0 = fl(a[0]); y0 = fl(a[1]); x1 = cl(a[0] + a[2]); y1 = cl(a[1] + a[3]);
                break;
            case PrimitiveKind::Disk:
                x0 = fl(a[0] - a[2]); y0 = fl(a[1] - a[2]); x1 = cl(a[0] + a[2]); y1 = cl(a[1] + a[2]);
                break;
            case PrimitiveKind::Wedge: {
                const double h = std::max(a[3], a[4]);
                x0 = fl(a[0]); x1 = cl(a[0] + a[2]); y0 = fl(a[1] - h); y1 = cl(a[1] + h);
                break;
            }
            case PrimitiveKind::Plus: {
                const double e = std::max(a[2], a[3]);
                x0 = fl(a[0] - e); y0 = fl(a[1] - e); x1 = cl(a[0] + e); y1 = cl(a[1] + e);
                break;
            }
            case PrimitiveKind::Dumbbell: {
                const double e = std::max(a[3], a[4]);
                x0 = fl(a[0] - a[3]); x1 = cl(a[1] + a[3]); y0 = fl(a[2] - e); y1 = cl(a[2] + e);
                break;
            }
        }
    }
};

void checkPrimitive(const Primitive& p) {
    const auto& a = p.params;
    auto positive = [&](double v, const char* what) {
        if (!(v > 0.0)) throw SpecError(p.line, std::string(what) + " must be positive");
    };
    switch (p.kind) {
        case PrimitiveKind::Rect: positive(a[2], "width"); positive(a[3], "height"); break;
        case PrimitiveKind::Disk: positive(a[2], "radius"); break;
        case PrimitiveKind::Wedge: positive(a[2], "length"); positive(a[3], "w0"); positive(a[4], "w1"); break;
        case PrimitiveKind::Plus: positive(a[2], "arm"); positive(a[3], "thickness"); break;
        case PrimitiveKind::Dumbbell:
            positive(a[3], "radius");
            positive(a[4], "bar");
            if (a[1] <= a[0]) throw SpecError(p.line, "dumbbell needs x2 > x1");
            break;
    }
}

// Ring of 8 neighbors in circular order.
constexpr int kRing[8][2] = {{1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}};

bool isSet(const Mask& m, int x, int y) { return m.contains(x, y) && m(x, y) != 0; }

int countNeighbors(const Mask& m, int x, int y) {
    int n = 0;
    for (const auto& d : kRing) n += isSet(m, x + d[0], y + d[1]) ? 1 : 0;
    return n;
}

// Simple point: removing it changes neither the 8-connectivity of the
// foreground nor the 4-connectivity of the background.
bool isSimple(const Mask& m, int x, int y) {
    bool fg[8];
    for (int i = 0; i < 8; ++i) fg[i] = isSet(m, x + kRing[i][0], y + kRing[i][1]);

    auto components = [&](bool wantFg, bool fourAdj, bool needFourNeighbor) {
        int label[8];
        std::fill(std::begin(label), std::end(label), -1);
        int count = 0;
        for (int i = 0; i < 8; ++i) {
            if (fg[i] != wantFg || label[i] >= 0) continue;
            label[i] = count;
            int stack[8];
            int top = 0;
            stack[top++] = i;
            bool touchesFour = false;
            while (top > 0) {
                const int a = stack[--top];
                if (kRing[a][0] == 0 || kRing[a][1] == 0) touchesFour = true;
                for (int b = 0; b < 8; ++b) {
                    if (fg[b] != wantFg || label[b] >= 0) continue;
                    const int dx = std::abs(kRing[a][0] - kRing[b][0]);
                    const int dy = std::abs(kRing[a][1] - kRing[b][1]);
                    const bool adj = fourAdj ? dx + dy == 1 : std::max(dx, dy) == 1;
                    if (adj) {
                        label[b] = count;
                        stack[top++] = b;
                    }
                }
            }
            if (!needFourNeighbor || touchesFour) ++count;
        }
        return count;
    };
    return components(true, false, false) == 1 && components(false, true, true) == 1;
}

int isqrtFloor(long long n) {
    if (n < 0) return -1;
    long long s = static_cast<long long>(std::sqrt(static_cast<double>(n)));
    while (s * s > n) --s;
    while ((s + 1) * (s + 1) <= n) ++s;
    return static_cast<int>(s);
}

// Squared distance from each foreground pixel to the nearest background pixel,
// counting pixels off the canvas as background; -1 on background.
Raster<long long> squaredDistance(const Mask& mask) {
    const int W = mask.width();
    const int H = mask.height();
    std::vector<Pixel> boundary;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (mask(x, y)) continue;
            if (isSet(mask, x + 1, y) || isSet(mask, x - 1, y) || isSet(mask, x, y + 1) || isSet(mask, x, y - 1)) {
                boundary.push_back({x, y});
            }
        }
    }
    Raster<long long> d(W, H, -1);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (!mask(x, y)) continue;
            long long best = std::min({static_cast<long long>(x + 1) * (x + 1), static_cast<long long>(W - x) * (W - x),
                                       static_cast<long long>(y + 1) * (y + 1), static_cast<long long>(H - y) * (H - y)});
            for (const Pixel& b : boundary) {
                const long long dx = b.x - x;
                const long long dy = b.y - y;
                best = std::min(best, dx * dx + dy * dy);
            }
            d(x, y) = best;
        }
    }
    return d;
}

}  // namespace

const char* toString(PrimitiveKind kind) { return info(kind).name; }

ShapeSpec ShapeSpec::parse(const std::string& text) {
    ShapeSpec spec;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    bool haveCanvas = false;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        const std::string& head = tok[0];
        if (head == "canvas") {
            if (tok.size() != 3) throw SpecError(line, "usage: canvas W H");
            const double w = number(tok[1], line);
            const double h = number(tok[2], line);
            if (w < 1 || h < 1 || w != std::floor(w) || h != std::floor(h)) {
                throw SpecError(line, "canvas size must be positive integers");
            }
            spec.width = static_cast<int>(w);
            spec.height = static_cast<int>(h);
            haveCanvas = true;
        } else if (head == "background") {
            spec.background = color255(tok, 1, line);
        } else if (head == "noise") {
            if (tok.size() < 2 || tok.size() > 3) throw SpecError(line, "usage: noise SIGMA [SEED]");
            spec.noiseSigma = number(tok[1], line);
            if (spec.noiseSigma < 0) throw SpecError(line, "noise sigma must be >= 0");
            if (tok.size() == 3) {
                const double s = number(tok[2], line);
                if (s < 0 || s != std::floor(s)) throw SpecError(line, "noise seed must be a non-negative integer");
                spec.noiseSeed = static_cast<std::uint64_t>(s);
            }
        } else if (head == "margin") {
            if (tok.size() != 2) throw SpecError(line, "usage: margin DELTA_E");
            spec.colorMargin = number(tok[1], line);
        } else {
            const KindInfo* k = nullptr;
            for (const auto& i : kKinds) {
                if (head == i.name) k = &i;
            }
            if (!k) throw SpecError(line, "unknown directive '" + head + "'");
            if (tok.size() != k->params + 5 || tok[k->params + 1] != "color") {
                throw SpecError(line, std::string("usage: ") + k->name + " <" + std::to_string(k->params) +
                                          " numbers> color R G B");
            }
            Primitive p;
            p.kind = k->kind;
            p.line = line;
            for (std::size_t i = 0; i < k->params; ++i) p.params.push_back(number(tok[i + 1], line));
            p.color = color255(tok, k->params + 2, line);
            checkPrimitive(p);
            spec.primitives.push_back(std::move(p));
        }
    }
    if (!haveCanvas) throw SpecError(line, "missing 'canvas W H' directive");
    return spec;
}

std::string ShapeSpec::serialize() const {
    auto col = [](const Vec3& c) {
        return fmt(c[0] * 255.0) + " " + fmt(c[1] * 255.0) + " " + fmt(c[2] * 255.0);
    };
    std::string out = "canvas " + std::to_string(width) + " " + std::to_string(height) + "\n";
    out += "background " + col(background) + "\n";
    if (noiseSigma > 0) out += "noise " + fmt(noiseSigma) + " " + std::to_string(noiseSeed) + "\n";
    if (colorMargin > 0) out += "margin " + fmt(colorMargin) + "\n";
    for (const auto& p : primitives) {
        out += toString(p.kind);
        for (double v : p.params) out += " " + fmt(v);
        out += " color " + col(p.color) + "\n";
    }
    return out;
}

Mask rasterize(const Primitive& p, int width, int height) {
    Shape s{p};
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;
    s.bounds(x0, y0, x1, y1);
    Mask m(width, height, 0);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            if (!s.inside(x, y)) continue;
            if (x < 0 || y < 0 || x >= width || y >= height) {
                throw SpecError(p.line, std::string(toString(p.kind)) + " extends outside the canvas");
            }
            m(x, y) = 1;
        }
    }
    return m;
}

Rendering renderShapes(const ShapeSpec& spec) {
    if (spec.width < 1 || spec.height < 1) throw SpecError(0, "canvas must be at least 1x1");
    Rendering out;
    out.image = RgbImage(spec.width, spec.height, spec.background);
    Mask used(spec.width, spec.height, 0);

    if (spec.colorMargin > 0) {
        std::vector<Vec3> labs{srgbToLab(spec.background)};
        for (const auto& p : spec.primitives) {
            const Vec3 lab = srgbToLab(p.color);
            for (const auto& other : labs) {
                if (deltaE(lab, other) < spec.colorMargin) {
                    throw SpecError(p.line, "color closer than the declared margin to another color");
                }
            }
            labs.push_back(lab);
        }
    }

    for (const auto& p : spec.primitives) {
        Mask m = rasterize(p, spec.width, spec.height);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!m.data()[i]) continue;
            if (used.data()[i]) throw SpecError(p.line, "primitive overlaps an earlier one");
            used.data()[i] = 1;
            out.image.data()[i] = p.color;
        }
        out.masks.push_back(std::move(m));
    }

    if (spec.noiseSigma > 0) {
        std::mt19937_64 rng(spec.noiseSeed);
        std::normal_distribution<double> n(0.0, spec.noiseSigma);
        const double clip = 5.0 * spec.noiseSigma;
        for (auto& px : out.image.data()) {
            for (auto& c : px) c = std::clamp(c + std::clamp(n(rng), -clip, clip), 0.0, 1.0);
        }
    }
    return out;
}

Raster<int> inscribedRadius(const Mask& mask) {
    const Raster<long long> d = squaredDistance(mask);
    Raster<int> r(mask.width(), mask.height(), -1);
    for (std::size_t i = 0; i < d.size(); ++i) {
        // Largest r with r^2 < d^2: every disk offset then lands on foreground.
        if (d.data()[i] >= 0) r.data()[i] = isqrtFloor(d.data()[i] - 1);
    }
    return r;
}

OracleSkeleton oracleMAT(const Mask& mask) {
    if (countSet(mask) == 0) throw std::invalid_argument("oracleMAT: empty mask");
    const int W = mask.width();
    const int H = mask.height();
    const Raster<long long> dist2 = squaredDistance(mask);
    const Raster<int> rad = inscribedRadius(mask);
    const int maxR = *std::max_element(rad.data().begin(), rad.data().end());

    // Maximal disks: the digital disk of p is not a subset of any other
    // pixel's digital disk.
    const DiskTable disks(std::max(maxR, 0));
    auto containedIn = [&](int px, int py, int rp, int qx, int qy, int rq) {
        const DiskGeometry& dp = disks[rp];
        const DiskGeometry& dq = disks[rq];
        for (int dy = -rp; dy <= rp; ++dy) {
            const int ey = py + dy - qy;
            if (ey < -rq || ey > rq) return false;
            const int hp = dp.halfWidth(dy);
            const int hq = dq.halfWidth(ey);
            if (px - hp < qx - hq || px + hp > qx + hq) return false;
        }
        return true;
    };
    Mask anchor(W, H, 0);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const int rp = rad(x, y);
            if (rp < 1) continue;
            bool contained = false;
            const int reach = maxR - rp + 2;
            for (int qy = std::max(0, y - reach); qy <= std::min(H - 1, y + reach) && !contained; ++qy) {
                for (int qx = std::max(0, x - reach); qx <= std::min(W - 1, x + reach); ++qx) {
                    const int rq = rad(qx, qy);
                    const int gap = rq - rp;
                    if (gap < 1) continue;
                    const long long dx = qx - x;
                    const long long dy = qy - y;
                    const long long d2 = dx * dx + dy * dy;
                    // Containment needs |p - q| <= gap + 1/sqrt(2); well inside that, it is certain.
                    if (4 * d2 > (2 * gap + 3) * (2 * gap + 3)) continue;
                    if (d2 <= static_cast<long long>(gap) * gap || containedIn(x, y, rp, qx, qy, rq)) {
                        contained = true;
                        break;
                    }
                }
            }
            if (!contained) anchor(x, y) = 1;
        }
    }

    std::vector<Pixel> order;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (mask(x, y)) order.push_back({x, y});
        }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Pixel a, Pixel b) { return dist2[a] < dist2[b]; });

    Mask s = mask;
    for (int i = 0; i < W * H; ++i) s.data()[static_cast<std::size_t>(i)] = mask.data()[static_cast<std::size_t>(i)] ? 1 : 0;

    // Homotopic thinning down to the anchors, shallowest pixels first.
    for (bool changed = true; changed;) {
        changed = false;
        for (const Pixel& p : order) {
            if (!s[p] || anchor[p]) continue;
            if (isSimple(s, p.x, p.y)) {
                s[p] = 0;
                changed = true;
            }
        }
    }
    // Unit width: drop remaining simple pixels that are not end points.
    for (bool changed = true; changed;) {
        changed = false;
        for (const Pixel& p : order) {
            if (!s[p]) continue;
            if (countNeighbors(s, p.x, p.y) >= 2 && isSimple(s, p.x, p.y)) {
                s[p] = 0;
                changed = true;
            }
        }
    }

    OracleSkeleton out{Mask(W, H, 0), Gray16(W, H, 0)};
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (!s(x, y)) continue;
            out.skeleton(x, y) = 1;
            out.radius(x, y) = static_cast<std::uint16_t>(std::max(0, rad(x, y)));
        }
    }
    return out;
}

}  // namespace asg
