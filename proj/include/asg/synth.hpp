#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "asg/image.hpp"

namespace asg {

class SpecError : public std::runtime_error {
public:
    SpecError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

enum class PrimitiveKind { Rect, Disk, Wedge, Plus, Dumbbell };

/// One filled primitive. Parameter meaning per kind:
///   rect      x0 y0 width height          (top-left corner, size)
///   disk      cx cy r                     (pixels with (x-cx)^2 + (y-cy)^2 <= r^2)
///   wedge     x0 cy length w0 w1          (horizontal trapezoid, height w0 at x0 tapering to w1)
///   plus      cx cy arm thickness         (two centered bars, each 2*arm+1 long)
///   dumbbell  x1 x2 cy r bar              (disks at (x1,cy), (x2,cy) joined by a bar `bar` px tall)
struct Primitive {
    PrimitiveKind kind = PrimitiveKind::Rect;
    std::vector<double> params;
    Vec3 color{1.0, 1.0, 1.0};
    int line = 0;
};

/// Text format, one directive per line ('#' starts a comment):
///   canvas W H
///   background R G B            (0..255)
///   noise SIGMA [SEED]          (SIGMA on the [0,1] scale)
///   margin DELTA_E              (minimum Lab distance between any two colors)
///   <primitive> <params...> color R G B
struct ShapeSpec {
    int width = 0;
    int height = 0;
    Vec3 background{0.0, 0.0, 0.0};
    double noiseSigma = 0.0;
    std::uint64_t noiseSeed = 1;
    double colorMargin = 0.0;
    std::vector<Primitive> primitives;

    static ShapeSpec parse(const std::string& text);
    std::string serialize() const;
};

const char* toString(PrimitiveKind kind);

/// Filled mask of a single primitive on a canvas.
Mask rasterize(const Primitive& p, int width, int height);

struct Rendering {
    RgbImage image;
    /// One mask per primitive, in spec order.
    std::vector<Mask> masks;
};

/// Throws SpecError when a primitive leaves the canvas, primitives overlap or
/// colors violate the declared margin.
Rendering renderShapes(const ShapeSpec& spec);

struct OracleSkeleton {
    Mask skeleton;
    /// Largest r whose digital disk fits in the mask, at skeleton pixels.
    Gray16 radius;
};

/// For every foreground pixel, the largest integer r such that the digital
/// disk of radius r fits in the mask (pixels off the canvas count as
/// background); -1 on background.
Raster<int> inscribedRadius(const Mask& mask);

/// Brute-force medial axis of a binary mask: centers of maximal digital disks,
/// joined by homotopic thinning and thinned to 8-connected unit width.
/// Throws std::invalid_argument on an empty mask.
OracleSkeleton oracleMAT(const Mask& mask);

}  // namespace asg
