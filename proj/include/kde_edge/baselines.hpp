#pragma once

#include <vector>

#include "kde_edge/image.hpp"

namespace kde_edge {

/// Convolution mask. 3x3 masks anchor at the center; the 2x2 Roberts pair
/// anchors at the top-left coefficient.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<double> weights;  // row-major
    int anchor_x = 0;
    int anchor_y = 0;
};

Mask sobel_x_mask();
Mask sobel_y_mask();
Mask prewitt_x_mask();
Mask prewitt_y_mask();
Mask roberts_x_mask();
Mask roberts_y_mask();

/// Signed gradient responses and their magnitude.
struct GradientImage {
    int width = 0;
    int height = 0;
    std::vector<double> gx;
    std::vector<double> gy;
    std::vector<double> magnitude;
};

enum class GradientOperator { Sobel, Prewitt, Roberts };

/// Signed mask response at every pixel, replicate-edge border extension.
std::vector<double> convolve_mask(const GrayImage& image, const Mask& mask);

GradientImage gradient_response(const GrayImage& image, GradientOperator op);

/// Edge iff gradient magnitude strictly exceeds threshold_fraction times
/// the image's maximum magnitude. Zero-gradient images come back empty.
EdgeMap gradient_detector(const GrayImage& image, GradientOperator op,
                          double threshold_fraction);

struct CannyParams {
    double sigma = 1.0;           ///< Gaussian smoothing std-dev, pixels
    double low_fraction = 0.1;    ///< hysteresis low, fraction of max magnitude
    double high_fraction = 0.2;   ///< hysteresis high, fraction of max magnitude
};

/// Gaussian smoothing, Sobel gradients, 4-direction non-maximum
/// suppression, double threshold, hysteresis by 8-connectivity.
EdgeMap canny(const GrayImage& image, const CannyParams& params);

}  // namespace kde_edge
