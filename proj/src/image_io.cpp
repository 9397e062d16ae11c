#include <png.h>

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "asg/imgproc.hpp"

namespace asg {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct RawImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bitDepth = 8;  // 8 or 16
    std::vector<std::uint16_t> samples;  // interleaved, row-major

    std::uint16_t maxValue = 255;
};

struct PngErrorState {
    std::string message;
};

void pngError(png_structp png, png_const_charp msg) {
    auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
    if (state) state->message = msg ? msg : "unknown libpng error";
    png_longjmp(png, 1);
}

void pngWarning(png_structp, png_const_charp) {}

// libpng reports errors through longjmp; everything touched after setjmp lives
// behind heap pointers so nothing on this frame is left indeterminate.
std::unique_ptr<RawImage> readPng(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw ImageError("cannot open image: " + path.string());

    png_byte sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw ImageError("not a PNG file: " + path.string());
    }

    auto err = std::make_unique<PngErrorState>();
    auto out = std::make_unique<RawImage>();
    auto rows = std::make_unique<std::vector<png_bytep>>();
    auto buffer = std::make_unique<std::vector<png_byte>>();

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, err.get(), pngError, pngWarning);
    if (!png) throw ImageError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw ImageError("libpng initialisation failed");
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageError("PNG decode error in " + path.string() + ": " + err->message);
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int colorType = png_get_color_type(png, info);
    const int bitDepth = png_get_bit_depth(png, info);

    if (colorType == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (colorType == PNG_COLOR_TYPE_GRAY && bitDepth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_read_update_info(png, info);

    out->width = static_cast<int>(width);
    out->height = static_cast<int>(height);
    out->channels = png_get_channels(png, info);
    out->bitDepth = png_get_bit_depth(png, info);
    out->maxValue = out->bitDepth == 16 ? 65535 : 255;

    const std::size_t rowBytes = png_get_rowbytes(png, info);
    buffer->resize(rowBytes * height);
    rows->resize(height);
    for (png_uint_32 y = 0; y < height; ++y) (*rows)[y] = buffer->data() + y * rowBytes;
    png_read_image(png, rows->data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t count = static_cast<std::size_t>(width) * height * out->channels;
    out->samples.resize(count);
    if (out->bitDepth == 16) {
        for (std::size_t i = 0; i < count; ++i) {
            out->samples[i] = static_cast<std::uint16_t>(((*buffer)[2 * i] << 8) | (*buffer)[2 * i + 1]);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) out->samples[i] = (*buffer)[i];
    }
    if (out->width == 0 || out->height == 0) throw ImageError("zero-area image: " + path.string());
    return out;
}

// Reads one whitespace/comment-delimited PNM header token.
bool readPnmToken(std::istream& in, std::string& token) {
    token.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    return !token.empty();
}

std::unique_ptr<RawImage> readPpm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageError("cannot open image: " + path.string());
    std::string magic, w, h, maxv;
    if (!readPnmToken(in, magic) || magic != "P6") throw ImageError("not a binary PPM (P6): " + path.string());
    if (!readPnmToken(in, w) || !readPnmToken(in, h) || !readPnmToken(in, maxv)) {
        throw ImageError("truncated PPM header: " + path.string());
    }
    auto out = std::make_unique<RawImage>();
    try {
        out->width = std::stoi(w);
        out->height = std::stoi(h);
        out->maxValue = static_cast<std::uint16_t>(std::stoi(maxv));
    } catch (const std::exception&) {
        throw ImageError("malformed PPM header: " + path.string());
    }
    if (out->width <= 0 || out->height <= 0) throw ImageError("zero-area image: " + path.string());
    if (out->maxValue == 0) throw ImageError("malformed PPM maxval: " + path.string());
    out->channels = 3;
    out->bitDepth = out->maxValue > 255 ? 16 : 8;
    const std::size_t count = static_cast<std::size_t>(out->width) * out->height * 3;
    const std::size_t bytesPer = out->bitDepth == 16 ? 2 : 1;
    std::vector<unsigned char> raw(count * bytesPer);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw ImageError("truncated PPM data: " + path.string());
    out->samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        out->samples[i] = bytesPer == 2 ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
    }
    return out;
}

std::unique_ptr<RawImage> readRaw(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw ImageError("cannot open image: " + path.string());
    char head[2] = {0, 0};
    probe.read(head, 2);
    if (probe.gcount() < 2) throw ImageError("empty or truncated image file: " + path.string());
    if (head[0] == 'P' && head[1] == '6') return readPpm(path);
    return readPng(path);
}

void writePng(const std::filesystem::path& path, int width, int height, int colorType, int bitDepth,
              const std::vector<png_byte>& bytes) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw ImageError("cannot write image: " + path.string());

    auto err = std::make_unique<PngErrorState>();
    auto rows = std::make_unique<std::vector<png_bytep>>();
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, err.get(), pngError, pngWarning);
    if (!png) throw ImageError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw ImageError("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw ImageError("PNG encode error in " + path.string() + ": " + err->message);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bitDepth, colorType,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const int channels = colorType == PNG_COLOR_TYPE_RGB ? 3 : 1;
    const std::size_t rowBytes = static_cast<std::size_t>(width) * channels * (bitDepth / 8);
    rows->resize(height);
    for (int y = 0; y < height; ++y) {
        (*rows)[y] = const_cast<png_bytep>(bytes.data() + y * rowBytes);
    }
    png_write_image(png, rows->data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::uint8_t toByte(double v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
}

}  // namespace

RgbImage loadImage(const std::filesystem::path& path) {
    const auto raw = readRaw(path);
    RgbImage img(raw->width, raw->height);
    const double scale = 1.0 / raw->maxValue;
    const int ch = raw->channels;
    for (int y = 0; y < raw->height; ++y) {
        for (int x = 0; x < raw->width; ++x) {
            const std::size_t base = (static_cast<std::size_t>(y) * raw->width + x) * ch;
            Vec3 px;
            if (ch >= 3) {
                px = {raw->samples[base] * scale, raw->samples[base + 1] * scale, raw->samples[base + 2] * scale};
            } else {
                const double g = raw->samples[base] * scale;
                px = {g, g, g};
            }
            img(x, y) = px;
        }
    }
    return img;
}

Mask loadMask(const std::filesystem::path& path) {
    const auto raw = readRaw(path);
    Mask m(raw->width, raw->height);
    for (int y = 0; y < raw->height; ++y) {
        for (int x = 0; x < raw->width; ++x) {
            const std::size_t base = (static_cast<std::size_t>(y) * raw->width + x) * raw->channels;
            m(x, y) = raw->samples[base] != 0 ? 1 : 0;
        }
    }
    return m;
}

Gray16 loadGray16(const std::filesystem::path& path) {
    const auto raw = readRaw(path);
    Gray16 g(raw->width, raw->height);
    for (int y = 0; y < raw->height; ++y) {
        for (int x = 0; x < raw->width; ++x) {
            g(x, y) = raw->samples[(static_cast<std::size_t>(y) * raw->width + x) * raw->channels];
        }
    }
    return g;
}

void savePng(const std::filesystem::path& path, const RgbImage& img) {
    std::vector<png_byte> bytes(img.size() * 3);
    for (std::size_t i = 0; i < img.size(); ++i) {
        for (int c = 0; c < 3; ++c) bytes[3 * i + c] = toByte(img.data()[i][c]);
    }
    writePng(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, 8, bytes);
}

void savePng(const std::filesystem::path& path, const Mask& mask) {
    std::vector<png_byte> bytes(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) bytes[i] = mask.data()[i] ? 255 : 0;
    writePng(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, 8, bytes);
}

void savePng16(const std::filesystem::path& path, const Gray16& img) {
    std::vector<png_byte> bytes(img.size() * 2);
    for (std::size_t i = 0; i < img.size(); ++i) {
        bytes[2 * i] = static_cast<png_byte>(img.data()[i] >> 8);
        bytes[2 * i + 1] = static_cast<png_byte>(img.data()[i] & 0xff);
    }
    writePng(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 16, bytes);
}

void savePpm(const std::filesystem::path& path, const RgbImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageError("cannot write image: " + path.string());
    out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
    for (const auto& px : img.data()) {
        for (int c = 0; c < 3; ++c) out.put(static_cast<char>(toByte(px[c])));
    }
    if (!out) throw ImageError("write failed: " + path.string());
}

}  // namespace asg
