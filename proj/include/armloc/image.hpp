#pragma once

/// \file image.hpp
/// \brief Minimal owning image and non-owning view, row-major, single plane.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace armloc {

template <typename T>
struct ImageView {
    std::span<const T> pixels;
    int width = 0;
    int height = 0;

    [[nodiscard]] T operator()(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    [[nodiscard]] bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
    [[nodiscard]] std::size_t size() const { return pixels.size(); }
};

template <typename T>
class Image {
public:
    Image() = default;
    Image(int width, int height, T fill = T{})
        : width_(width), height_(height)
    {
        if (width < 0 || height < 0) {
            throw std::invalid_argument("image dimensions must be non-negative");
        }
        data_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] bool empty() const { return data_.empty(); }
    [[nodiscard]] std::size_t size() const { return data_.size(); }

    T& operator()(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const T& operator()(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    [[nodiscard]] bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    std::span<T> pixels() { return data_; }
    [[nodiscard]] std::span<const T> pixels() const { return data_; }

    [[nodiscard]] ImageView<T> view() const { return { data_, width_, height_ }; }
    operator ImageView<T>() const { return view(); } // NOLINT(google-explicit-constructor)

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using Plane = Image<float>;
using PlaneView = ImageView<float>;

template <typename T>
Image<T> to_image(ImageView<T> view)
{
    Image<T> out(view.width, view.height);
    std::copy(view.pixels.begin(), view.pixels.end(), out.pixels().begin());
    return out;
}

/// Three planes of identical size (R, G, B or three replicated gray planes).
struct ColorImage {
    Plane r, g, b;

    [[nodiscard]] int width() const { return r.width(); }
    [[nodiscard]] int height() const { return r.height(); }

    friend bool operator==(const ColorImage&, const ColorImage&) = default;
};

namespace detail {

    inline int reflect_index(int i, int n)
    {
        if (n == 1) {
            return 0;
        }
        const int period = 2 * n - 2;
        i %= period;
        if (i < 0) {
            i += period;
        }
        return i < n ? i : period - i;
    }

    inline std::vector<double> gaussian_kernel(double sigma)
    {
        const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
        std::vector<double> k(2 * radius + 1);
        double sum = 0.0;
        for (int i = -radius; i <= radius; ++i) {
            k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
            sum += k[i + radius];
        }
        for (auto& v : k) {
            v /= sum;
        }
        return k;
    }

} // namespace detail

/// Separable Gaussian blur with mirror-reflect borders. sigma <= 0 returns a copy.
template <typename T>
Image<T> gaussian_blur(ImageView<T> src, double sigma)
{
    Image<T> out = to_image(src);
    if (sigma <= 0.0 || src.size() == 0) {
        return out;
    }
    const auto kernel = detail::gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    const int w = src.width;
    const int h = src.height;

    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[k + radius] * src(detail::reflect_index(x + k, w), y);
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[k + radius] * tmp[static_cast<std::size_t>(detail::reflect_index(y + k, h)) * w + x];
            }
            out(x, y) = static_cast<T>(acc);
        }
    }
    return out;
}

/// Bilinear sample with zero padding outside the image.
inline double sample_bilinear(PlaneView src, double x, double y)
{
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const double ax = x - fx;
    const double ay = y - fy;
    auto at = [&](int xi, int yi) -> double { return src.contains(xi, yi) ? src(xi, yi) : 0.0; };
    if (ax == 0.0 && ay == 0.0) {
        return at(x0, y0);
    }
    return (1 - ax) * (1 - ay) * at(x0, y0) + ax * (1 - ay) * at(x0 + 1, y0)
        + (1 - ax) * ay * at(x0, y0 + 1) + ax * ay * at(x0 + 1, y0 + 1);
}

} // namespace armloc
