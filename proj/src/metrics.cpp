#include "vas/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vas/error.hpp"
#include "vas/parallel.hpp"

namespace vas {

namespace {

constexpr std::array<double, 5> kWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

struct Plane {
  int w = 0;
  int h = 0;
  std::vector<double> v;
  double operator()(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

Plane luma_plane(const Image& img) {
  const Image l = img.channels() == 1 ? img : to_luma(img);
  Plane p{l.width(), l.height(), {}};
  p.v.assign(l.data().begin(), l.data().end());
  return p;
}

void check_pair(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) throw DimensionMismatch(std::string(what) + ": images differ in shape");
  if (a.empty()) throw InvalidArgument(std::string(what) + ": empty image");
}

const std::array<double, kWindow>& gaussian_taps() {
  static const auto taps = [] {
    std::array<double, kWindow> t{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
      const double x = i - (kWindow - 1) / 2.0;
      t[static_cast<std::size_t>(i)] = std::exp(-x * x / (2.0 * kSigma * kSigma));
      sum += t[static_cast<std::size_t>(i)];
    }
    for (auto& v : t) v /= sum;
    return t;
  }();
  return taps;
}

// Separable Gaussian filter, valid region only.
Plane filter_valid(const Plane& p) {
  const auto& g = gaussian_taps();
  const int ow = p.w - kWindow + 1;
  const int oh = p.h - kWindow + 1;
  Plane tmp{ow, p.h, std::vector<double>(static_cast<std::size_t>(ow) * p.h)};
  for (int y = 0; y < p.h; ++y) {
    const double* r = p.v.data() + static_cast<std::size_t>(y) * p.w;
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += g[static_cast<std::size_t>(k)] * r[x + k];
      tmp.v[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  Plane out{ow, oh, std::vector<double>(static_cast<std::size_t>(ow) * oh)};
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += g[static_cast<std::size_t>(k)] * tmp(x, y + k);
      out.v[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane out{a.w, a.h, std::vector<double>(a.v.size())};
  for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

// 2x2 average pool; an odd trailing row/column is paired with itself.
Plane pool2(const Plane& p) {
  const int ow = (p.w + 1) / 2;
  const int oh = (p.h + 1) / 2;
  Plane out{ow, oh, std::vector<double>(static_cast<std::size_t>(ow) * oh)};
  for (int y = 0; y < oh; ++y) {
    const int y0 = 2 * y;
    const int y1 = std::min(2 * y + 1, p.h - 1);
    for (int x = 0; x < ow; ++x) {
      const int x0 = 2 * x;
      const int x1 = std::min(2 * x + 1, p.w - 1);
      out.v[static_cast<std::size_t>(y) * ow + x] = 0.25 * (p(x0, y0) + p(x1, y0) + p(x0, y1) + p(x1, y1));
    }
  }
  return out;
}

struct ScaleTerms {
  double luminance_cs = 0.0;  // mean of l * cs
  double cs = 0.0;            // mean of cs
};

ScaleTerms ssim_terms(const Plane& a, const Plane& b) {
  const Plane mu_a = filter_valid(a);
  const Plane mu_b = filter_valid(b);
  const Plane e_ab = filter_valid(product(a, b));
  const Plane e_aa = filter_valid(product(a, a));
  const Plane e_bb = filter_valid(product(b, b));
  double sum_lcs = 0.0, sum_cs = 0.0;
  for (std::size_t i = 0; i < mu_a.v.size(); ++i) {
    const double ma = mu_a.v[i], mb = mu_b.v[i];
    const double num0 = 2.0 * ma * mb;
    const double den0 = ma * ma + mb * mb;
    const double l = (num0 + kC1) / (den0 + kC1);
    const double cs = (2.0 * e_ab.v[i] - num0 + kC2) / (e_aa.v[i] + e_bb.v[i] - den0 + kC2);
    sum_lcs += l * cs;
    sum_cs += cs;
  }
  const auto n = static_cast<double>(mu_a.v.size());
  return {sum_lcs / n, sum_cs / n};
}

}  // namespace

double psnr(const Image& img, const Image& ref) {
  check_pair(img, ref, "psnr");
  const Plane a = luma_plane(img);
  const Plane b = luma_plane(ref);
  double se = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    const double d = a.v[i] - b.v[i];
    se += d * d;
  }
  if (se == 0.0) return kPsnrIdentical;
  const double mse = se / static_cast<double>(a.v.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

int ms_ssim_scale_count(int width, int height) {
  const int m = std::min(width, height);
  if (m < kWindow) {
    throw InvalidArgument("ms_ssim needs images of at least " + std::to_string(kWindow) + " pixels per side");
  }
  int scales = static_cast<int>(kWeights.size());
  while (scales > 1 && (m >> (scales - 1)) < kWindow) --scales;
  return scales;
}

double ms_ssim(const Image& img, const Image& ref) {
  check_pair(img, ref, "ms_ssim");
  const int scales = ms_ssim_scale_count(img.width(), img.height());
  double wsum = 0.0;
  for (int s = 0; s < scales; ++s) wsum += kWeights[static_cast<std::size_t>(s)];
  Plane a = luma_plane(img);
  Plane b = luma_plane(ref);
  double result = 1.0;
  for (int s = 0; s < scales; ++s) {
    const ScaleTerms t = ssim_terms(a, b);
    const double w = kWeights[static_cast<std::size_t>(s)] / wsum;
    const double term = s + 1 == scales ? t.luminance_cs : t.cs;
    result *= std::pow(std::max(term, 0.0), w);
    if (s + 1 < scales) {
      a = pool2(a);
      b = pool2(b);
    }
  }
  return std::clamp(result, 0.0, 1.0);
}

SequenceScore sequence_score(const std::vector<Image>& frames, const std::vector<Image>& refs, Metric metric,
                             int threads) {
  if (frames.size() != refs.size()) throw DimensionMismatch("sequence_score: frame counts differ");
  if (frames.empty()) throw InvalidArgument("sequence_score: empty sequence");
  SequenceScore out;
  out.per_frame.resize(frames.size());
  parallel_for(
      0, static_cast<int>(frames.size()),
      [&](int i) {
        const auto k = static_cast<std::size_t>(i);
        out.per_frame[k] = metric == Metric::psnr ? psnr(frames[k], refs[k]) : ms_ssim(frames[k], refs[k]);
      },
      threads);
  double sum = 0.0;
  int finite = 0;
  for (double v : out.per_frame) {
    if (std::isinf(v)) {
      ++out.infinite_count;
    } else {
      sum += v;
      ++finite;
    }
  }
  out.mean = finite > 0 ? sum / finite : kPsnrIdentical;
  return out;
}

}  // namespace vas
