#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

#include "asg/imgproc.hpp"

namespace asg {

namespace {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        if (p) fftw_destroy_plan(p);
    }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

template <typename T>
struct FftwFree {
    void operator()(T* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree<T>>;

template <typename T>
FftwBuffer<T> fftwAlloc(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
    if (!p) throw std::bad_alloc();
    return FftwBuffer<T>(p);
}

// Real 2D transform pair over one H x W plane. FFTW's r2c output keeps only
// W/2+1 columns.
class PlaneFft {
public:
    PlaneFft(int width, int height)
        : width_(width), height_(height), spectralWidth_(width / 2 + 1),
          real_(fftwAlloc<double>(static_cast<std::size_t>(width) * height)),
          spectrum_(fftwAlloc<fftw_complex>(static_cast<std::size_t>(spectralWidth_) * height)) {
        forward_.reset(fftw_plan_dft_r2c_2d(height, width, real_.get(), spectrum_.get(), FFTW_ESTIMATE));
        inverse_.reset(fftw_plan_dft_c2r_2d(height, width, spectrum_.get(), real_.get(), FFTW_ESTIMATE));
    }

    std::size_t spectralSize() const { return static_cast<std::size_t>(spectralWidth_) * height_; }
    int spectralWidth() const { return spectralWidth_; }
    double* real() { return real_.get(); }
    std::complex<double>* spectrum() { return reinterpret_cast<std::complex<double>*>(spectrum_.get()); }

    void forward() { fftw_execute(forward_.get()); }
    // Unnormalized; caller divides by W*H.
    void inverse() { fftw_execute(inverse_.get()); }

private:
    int width_;
    int height_;
    int spectralWidth_;
    FftwBuffer<double> real_;
    FftwBuffer<fftw_complex> spectrum_;
    Plan forward_;
    Plan inverse_;
};

}  // namespace

int l0IterationCount(const L0Params& params) {
    int n = 0;
    for (double beta = 2.0 * params.lambda; beta < params.betaMax; beta *= params.kappa) ++n;
    return n;
}

RgbImage smoothL0(const RgbImage& img, const L0Params& params) {
    if (!std::isfinite(params.lambda) || !std::isfinite(params.kappa) || !std::isfinite(params.betaMax)) {
        throw std::invalid_argument("smoothL0: non-finite parameters");
    }
    if (params.lambda <= 0.0 || params.kappa <= 1.0) {
        throw std::invalid_argument("smoothL0: requires lambda > 0 and kappa > 1");
    }
    const int W = img.width();
    const int H = img.height();
    const std::size_t N = img.size();
    if (N == 0) return img;

    PlaneFft fft(W, H);
    const int SW = fft.spectralWidth();
    const std::size_t NS = fft.spectralSize();

    // |F(dx)|^2 + |F(dy)|^2 for forward differences with periodic wrap.
    std::vector<double> gradientOtf(NS);
    for (int v = 0; v < H; ++v) {
        const double cy = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * v / H);
        for (int u = 0; u < SW; ++u) {
            const double cx = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * u / W);
            gradientOtf[static_cast<std::size_t>(v) * SW + u] = cx + cy;
        }
    }

    std::array<std::vector<double>, 3> S;
    std::array<std::vector<std::complex<double>>, 3> inputSpectrum;
    for (int c = 0; c < 3; ++c) {
        S[c].resize(N);
        for (std::size_t i = 0; i < N; ++i) S[c][i] = img.data()[i][c];
        std::copy(S[c].begin(), S[c].end(), fft.real());
        fft.forward();
        inputSpectrum[c].assign(fft.spectrum(), fft.spectrum() + NS);
    }

    std::array<std::vector<double>, 3> h, v;
    for (int c = 0; c < 3; ++c) {
        h[c].resize(N);
        v[c].resize(N);
    }
    auto at = [W](int x, int y) { return static_cast<std::size_t>(y) * W + x; };

    const double invN = 1.0 / static_cast<double>(N);
    for (double beta = 2.0 * params.lambda; beta < params.betaMax; beta *= params.kappa) {
        for (int c = 0; c < 3; ++c) {
            const auto& s = S[c];
            for (int y = 0; y < H; ++y) {
                const int yn = (y + 1 == H) ? 0 : y + 1;
                for (int x = 0; x < W; ++x) {
                    const int xn = (x + 1 == W) ? 0 : x + 1;
                    h[c][at(x, y)] = s[at(xn, y)] - s[at(x, y)];
                    v[c][at(x, y)] = s[at(x, yn)] - s[at(x, y)];
                }
            }
        }
        const double threshold = params.lambda / beta;
        for (std::size_t i = 0; i < N; ++i) {
            double mag = 0.0;
            for (int c = 0; c < 3; ++c) mag += h[c][i] * h[c][i] + v[c][i] * v[c][i];
            if (mag < threshold) {
                for (int c = 0; c < 3; ++c) h[c][i] = v[c][i] = 0.0;
            }
        }
        for (int c = 0; c < 3; ++c) {
            double* div = fft.real();
            for (int y = 0; y < H; ++y) {
                const int yp = (y == 0) ? H - 1 : y - 1;
                for (int x = 0; x < W; ++x) {
                    const int xp = (x == 0) ? W - 1 : x - 1;
                    div[at(x, y)] = (h[c][at(xp, y)] - h[c][at(x, y)]) + (v[c][at(x, yp)] - v[c][at(x, y)]);
                }
            }
            fft.forward();
            auto* spec = fft.spectrum();
            for (std::size_t k = 0; k < NS; ++k) {
                spec[k] = (inputSpectrum[c][k] + beta * spec[k]) / (1.0 + beta * gradientOtf[k]);
            }
            fft.inverse();
            for (std::size_t i = 0; i < N; ++i) S[c][i] = fft.real()[i] * invN;
        }
    }

    RgbImage out(W, H);
    for (std::size_t i = 0; i < N; ++i) {
        for (int c = 0; c < 3; ++c) out.data()[i][c] = std::clamp(S[c][i], 0.0, 1.0);
    }
    return out;
}

}  // namespace asg
