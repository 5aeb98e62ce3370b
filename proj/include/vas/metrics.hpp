#pragma once

// Full-reference quality metrics on the luma plane (BT.601).

#include <limits>
#include <vector>

#include "vas/image.hpp"

namespace vas {

inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10 log10(255^2 / MSE). Identical images give +infinity.
double psnr(const Image& img, const Image& ref);

/// Number of MS-SSIM scales used for a given size: 5, reduced while the
/// coarsest scale would be smaller than the 11-tap window.
int ms_ssim_scale_count(int width, int height);

/// Multi-scale SSIM (Wang, Simoncelli, Bovik 2003) with the standard
/// weights, 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03 and
/// 2x2 average pooling between scales. With fewer than 5 scales the leading
/// weights are renormalized to sum to 1.
double ms_ssim(const Image& img, const Image& ref);

enum class Metric { psnr, ms_ssim };

struct SequenceScore {
  std::vector<double> per_frame;
  /// Mean over finite scores.
  double mean = 0.0;
  /// Frames left out of the mean (identical frames under PSNR).
  int infinite_count = 0;
};

SequenceScore sequence_score(const std::vector<Image>& frames, const std::vector<Image>& refs, Metric metric,
                             int threads = 0);

}  // namespace vas
