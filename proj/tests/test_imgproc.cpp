#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "asg/imgproc.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace asg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "asg_unit_imgproc";
    fs::create_directories(dir);
    return dir / name;
}

double regionVariance(const RgbImage& img, int x0, int x1) {
    double s = 0, s2 = 0;
    int n = 0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = x0; x < x1; ++x) {
            const double v = img(x, y)[0];
            s += v;
            s2 += v * v;
            ++n;
        }
    }
    const double m = s / n;
    return s2 / n - m * m;
}

// Column where the mean row profile crosses the midpoint of the two tones.
double edgeColumn(const RgbImage& img, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    for (int x = 1; x < img.width(); ++x) {
        double a = 0, b = 0;
        for (int y = 0; y < img.height(); ++y) {
            a += img(x - 1, y)[0];
            b += img(x, y)[0];
        }
        a /= img.height();
        b /= img.height();
        if (a < mid && b >= mid) return x - 1 + (mid - a) / (b - a);
    }
    return -1;
}

}  // namespace

TEST_SUITE("imgproc") {

TEST_CASE("png round trip of a single white pixel") {
    const fs::path p = scratch("white.png");
    savePng(p, RgbImage(1, 1, Vec3{1, 1, 1}));
    const RgbImage img = loadImage(p);
    REQUIRE(img.width() == 1);
    REQUIRE(img.height() == 1);
    CHECK(img(0, 0) == Vec3{1, 1, 1});
}

TEST_CASE("ppm and png agree on 8-bit content") {
    const RgbImage src = test::blockImage(17, 9, 3, 0.0, 4);
    savePpm(scratch("a.ppm"), src);
    savePng(scratch("a.png"), src);
    const RgbImage a = loadImage(scratch("a.ppm"));
    const RgbImage b = loadImage(scratch("a.png"));
    CHECK(a == b);
    for (std::size_t i = 0; i < src.size(); ++i) {
        for (int c = 0; c < 3; ++c) CHECK(std::abs(a.data()[i][c] - src.data()[i][c]) <= 0.5 / 255.0 + 1e-12);
    }
}

TEST_CASE("truncated and missing files raise ImageError") {
    const fs::path good = scratch("t.png");
    savePng(good, test::noiseImage(32, 32, 1));
    const auto size = fs::file_size(good);
    std::ifstream in(good, std::ios::binary);
    std::string bytes(size / 2, '\0');
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    std::ofstream(scratch("trunc.png"), std::ios::binary) << bytes;
    CHECK_THROWS_AS(loadImage(scratch("trunc.png")), ImageError);
    CHECK_THROWS_AS(loadImage(scratch("absent.png")), ImageError);
    std::ofstream(scratch("junk.png"), std::ios::binary) << "not an image";
    CHECK_THROWS_AS(loadImage(scratch("junk.png")), ImageError);
}

TEST_CASE("mask and 16-bit loaders keep values") {
    Gray16 g(5, 4, 0);
    g(2, 1) = 7;
    g(4, 3) = 300;
    savePng16(scratch("g16.png"), g);
    CHECK(loadGray16(scratch("g16.png")) == g);
    Mask m(5, 4, 0);
    m(1, 2) = 1;
    savePng(scratch("m.png"), m);
    CHECK(loadMask(scratch("m.png")) == m);
}

TEST_CASE("L0 smoothing leaves a constant image alone") {
    const RgbImage img = test::constantImage(24, 16, {0.3, 0.6, 0.9});
    const RgbImage out = smoothL0(img);
    for (std::size_t i = 0; i < img.size(); ++i) {
        for (int c = 0; c < 3; ++c) CHECK(out.data()[i][c] == doctest::Approx(img.data()[i][c]).epsilon(1e-9));
    }
}

TEST_CASE("L0 smoothing flattens a noisy step and keeps the edge") {
    const int w = 64, h = 32;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 0.02);
    RgbImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = std::clamp((x < w / 2 ? 0.2 : 0.8) + noise(rng), 0.0, 1.0);
            img(x, y) = {v, v, v};
        }
    }
    const RgbImage out = smoothL0(img);
    // Keep away from the wrap-around seam of the periodic solve.
    CHECK(regionVariance(out, 4, w / 2 - 4) * 10 <= regionVariance(img, 4, w / 2 - 4));
    CHECK(regionVariance(out, w / 2 + 4, w - 4) * 10 <= regionVariance(img, w / 2 + 4, w - 4));
    CHECK(std::abs(edgeColumn(out, 0.2, 0.8) - edgeColumn(img, 0.2, 0.8)) <= 1.0);
}

TEST_CASE("L0 smoothing keeps dimensions and range") {
    const RgbImage img = test::noiseImage(21, 13, 5);
    const RgbImage out = smoothL0(img, {0.05, 2.0, 1e5});
    CHECK(out.width() == 21);
    CHECK(out.height() == 13);
    for (const auto& v : out.data()) {
        for (double c : v) {
            CHECK(c >= 0.0);
            CHECK(c <= 1.0);
        }
    }
    CHECK_THROWS(smoothL0(img, {std::nan(""), 2.0, 1e5}));
    CHECK_THROWS(smoothL0(img, {0.02, 1.0, 1e5}));
}

TEST_CASE("L0 iteration count at the default schedule") {
    // beta doubles from 2*lambda = 0.04 until it reaches 1e5.
    CHECK(l0IterationCount({}) == 22);
}

TEST_CASE("sRGB to Lab reference colors") {
    const Vec3 white = srgbToLab({1, 1, 1});
    CHECK(std::abs(white[0] - 100.0) < 0.01);
    CHECK(std::abs(white[1]) < 0.01);
    CHECK(std::abs(white[2]) < 0.01);
    const Vec3 black = srgbToLab({0, 0, 0});
    for (double v : black) CHECK(std::abs(v) < 1e-9);
    // Independent reference values (standard sRGB, D65, 2 degree observer).
    const Vec3 red = srgbToLab({1, 0, 0});
    CHECK(red[0] == doctest::Approx(53.2406).epsilon(1e-4));
    CHECK(red[1] == doctest::Approx(80.0923).epsilon(1e-4));
    CHECK(red[2] == doctest::Approx(67.2028).epsilon(1e-4));
    const Vec3 slate = srgbToLab({0.2, 0.4, 0.6});
    CHECK(slate[0] == doctest::Approx(42.0080).epsilon(1e-4));
    CHECK(std::abs(slate[1] - -0.1540) < 1e-3);
    CHECK(slate[2] == doctest::Approx(-32.8429).epsilon(1e-4));
}

TEST_CASE("Lab round trip stays within 0.1 delta E") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 rgb{u(rng), u(rng), u(rng)};
        const Vec3 lab = srgbToLab(rgb);
        CHECK(deltaE(lab, srgbToLab(labToSrgb(lab))) < 0.1);
    }
}

TEST_CASE("toLab is the per-pixel conversion") {
    const RgbImage img = test::noiseImage(7, 5, 9);
    const LabImage lab = toLab(img);
    CHECK(lab.width() == 7);
    CHECK(lab.height() == 5);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(lab.data()[i] == srgbToLab(img.data()[i]));
}

TEST_CASE("tile grid of a constant image") {
    const TileGrid g = buildTileGrid(test::constantImage(20, 14, {0.25, 0.5, 0.75}), 6);
    CHECK(g.rows() == 3);
    CHECK(g.cols() == 4);
    for (int r = 0; r < g.rows(); ++r) {
        for (int c = 0; c < g.cols(); ++c) CHECK(g.mean(r, c) == Vec3{0.25, 0.5, 0.75});
    }
}

TEST_CASE("tile grid on a half-split 12x12 image") {
    RgbImage img(12, 12);
    for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 12; ++x) img(x, y) = x < 6 ? Vec3{0, 0, 0} : Vec3{1, 1, 1};
    }
    const TileGrid g = buildTileGrid(img, 6);
    REQUIRE(g.rows() == 2);
    REQUIRE(g.cols() == 2);
    for (int r = 0; r < 2; ++r) {
        CHECK(g.mean(r, 0) == Vec3{0, 0, 0});
        CHECK(g.mean(r, 1) == Vec3{1, 1, 1});
    }
}

TEST_CASE("tile means equal brute-force means, partial edge tiles included") {
    for (const auto& [w, h] : {std::pair{13, 13}, std::pair{31, 20}, std::pair{5, 3}}) {
        const RgbImage img = test::noiseImage(w, h, static_cast<std::uint64_t>(w * 100 + h));
        const TileGrid g = buildTileGrid(img, 6);
        CHECK(g.rows() == (h + 5) / 6);
        CHECK(g.cols() == (w + 5) / 6);
        for (int r = 0; r < g.rows(); ++r) {
            for (int c = 0; c < g.cols(); ++c) {
                Vec3 s{0, 0, 0};
                int n = 0;
                for (int y = r * 6; y < std::min(h, r * 6 + 6); ++y) {
                    for (int x = c * 6; x < std::min(w, c * 6 + 6); ++x) {
                        for (int k = 0; k < 3; ++k) s[k] += img(x, y)[k];
                        ++n;
                    }
                }
                for (int k = 0; k < 3; ++k) CHECK(std::abs(g.mean(r, c)[k] - s[k] / n) <= 1e-12);
            }
        }
    }
    // 13x13: the last row and column of tiles are 6x1, 1x6 and 1x1 strips.
    const RgbImage img = test::noiseImage(13, 13, 77);
    const TileGrid g = buildTileGrid(img, 6);
    CHECK(g.mean(2, 2) == img(12, 12));
    CHECK(g.centerX(2) == 12.0);
    CHECK(g.centerY(0) == 2.5);
}

}  // TEST_SUITE
