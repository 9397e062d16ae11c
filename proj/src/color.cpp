#include <cmath>

#include "asg/imgproc.hpp"

namespace asg {

namespace {

// D65 reference white.
constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.00000;
constexpr double kWhiteZ = 1.08883;

constexpr double kEpsilon = 216.0 / 24389.0;  // (6/29)^3
constexpr double kKappa = 24389.0 / 27.0;     // (29/3)^3

double srgbToLinear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linearToSrgb(double v) {
    return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double labF(double t) {
    return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0;
}

double labFInv(double f) {
    const double f3 = f * f * f;
    return f3 > kEpsilon ? f3 : (116.0 * f - 16.0) / kKappa;
}

}  // namespace

Vec3 srgbToLab(const Vec3& rgb) {
    const double r = srgbToLinear(rgb[0]);
    const double g = srgbToLinear(rgb[1]);
    const double b = srgbToLinear(rgb[2]);

    const double x = 0.412453 * r + 0.357580 * g + 0.180423 * b;
    const double y = 0.212671 * r + 0.715160 * g + 0.072169 * b;
    const double z = 0.019334 * r + 0.119193 * g + 0.950227 * b;

    const double fx = labF(x / kWhiteX);
    const double fy = labF(y / kWhiteY);
    const double fz = labF(z / kWhiteZ);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Vec3 labToSrgb(const Vec3& lab) {
    const double fy = (lab[0] + 16.0) / 116.0;
    const double fx = fy + lab[1] / 500.0;
    const double fz = fy - lab[2] / 200.0;

    const double x = kWhiteX * labFInv(fx);
    const double y = kWhiteY * labFInv(fy);
    const double z = kWhiteZ * labFInv(fz);

    // Inverse of the forward matrix above.
    const double r = 3.2404813432 * x - 1.5371515163 * y - 0.4985363262 * z;
    const double g = -0.9692549500 * x + 1.8759900015 * y + 0.0415559266 * z;
    const double b = 0.0556466391 * x - 0.2040413384 * y + 1.0573110696 * z;
    return {linearToSrgb(r), linearToSrgb(g), linearToSrgb(b)};
}

double deltaE(const Vec3& a, const Vec3& b) {
    const double d0 = a[0] - b[0];
    const double d1 = a[1] - b[1];
    const double d2 = a[2] - b[2];
    return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

LabImage toLab(const RgbImage& img) {
    LabImage lab(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) lab.data()[i] = srgbToLab(img.data()[i]);
    return lab;
}

}  // namespace asg
