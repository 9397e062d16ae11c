#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace asg {

/// Integer pixel coordinate. x grows to the right, y grows downward.
struct Pixel {
    int x = 0;
    int y = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
};

using Vec3 = std::array<double, 3>;

class ImageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major 2D raster. The Tag parameter keeps semantically different
/// rasters (sRGB vs CIELAB, say) from being mixed up at compile time.
template <typename T, typename Tag = void>
class Raster {
public:
    using value_type = T;

    Raster() = default;
    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height) {
        if (width < 0 || height < 0) {
            throw ImageError("negative raster dimensions");
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
    bool contains(Pixel p) const { return contains(p.x, p.y); }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    T& operator()(int x, int y) { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const { return data_[index(x, y)]; }
    T& operator[](Pixel p) { return data_[index(p.x, p.y)]; }
    const T& operator[](Pixel p) const { return data_[index(p.x, p.y)]; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    friend bool operator==(const Raster& a, const Raster& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

struct SrgbTag;
struct LabTag;

/// sRGB image, channels normalized to [0,1].
using RgbImage = Raster<Vec3, SrgbTag>;
/// CIELAB (D65) image.
using LabImage = Raster<Vec3, LabTag>;
/// Binary mask, 0 or 1 per pixel.
using Mask = Raster<std::uint8_t>;
/// 16-bit per-pixel scalar, used for radius maps.
using Gray16 = Raster<std::uint16_t>;

inline std::size_t countSet(const Mask& m) {
    std::size_t n = 0;
    for (auto v : m.data()) {
        n += v ? 1 : 0;
    }
    return n;
}

}  // namespace asg
