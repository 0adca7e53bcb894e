#include "twinlight/render/sampler.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twinlight/common/image.h"

namespace twinlight {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinCosineFraction = 0.25;

int TexelIndex(const Vec3& d, int w, int h, int& x, int& y) {
  const PixelCoord p = DirToPixel(d, w, h);
  x = static_cast<int>(std::floor(p.u));
  x = ((x % w) + w) % w;
  y = std::clamp(static_cast<int>(std::floor(p.v)), 0, h - 1);
  return y * w + x;
}

}  // namespace

void ValidateSamplerConfig(const SamplerConfig& config) {
  Require(config.spp >= 1, "samples per pixel must be >= 1");
  Require(config.strata_x >= 0 && config.strata_y >= 0, "strata counts must be >= 0");
}

void BuildFrame(const Vec3& n, Vec3& t, Vec3& b) {
  // Branchless basis (Duff et al.).
  const double sign = std::copysign(1.0, n.z());
  const double a = -1.0 / (sign + n.z());
  const double c = n.x() * n.y() * a;
  t = Vec3(1.0 + sign * n.x() * n.x() * a, sign * c, -sign * n.x());
  b = Vec3(c, sign + n.y() * n.y() * a, -n.y());
}

Vec3 CosineHemisphere(const Vec3& n, double u1, double u2) {
  const double r = std::sqrt(u1);
  const double phi = 2.0 * kPi * u2;
  const double z = std::sqrt(std::max(0.0, 1.0 - u1));
  Vec3 t, b;
  BuildFrame(n, t, b);
  return (r * std::cos(phi)) * t + (r * std::sin(phi)) * b + z * n;
}

PixelSampler::PixelSampler(const SamplerConfig& config, uint64_t domain, uint64_t pixel)
    : rng_(config.seed, domain, pixel) {
  const int side = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(config.spp)))));
  sx_ = config.strata_x > 0 ? config.strata_x : side;
  sy_ = config.strata_y > 0 ? config.strata_y : side;
}

void PixelSampler::Next(double u[4]) {
  const int cells = sx_ * sy_;
  const double j0 = rng_.Uniform(), j1 = rng_.Uniform();
  if (index_ < cells) {
    const int cx = index_ % sx_, cy = index_ / sx_;
    u[0] = (cx + j0) / sx_;
    u[1] = (cy + j1) / sy_;
  } else {
    u[0] = j0;
    u[1] = j1;
  }
  u[2] = rng_.Uniform();
  u[3] = rng_.Uniform();
  ++index_;
}

Vec3 EnvRadiance(const EnvMap& env, const Vec3& direction) {
  int x, y;
  TexelIndex(direction, env.width(), env.height(), x, y);
  return env.Texel(x, y);
}

EnvDistribution::EnvDistribution(const EnvMap& env) : width_(env.width()), height_(env.height()) {
  const size_t n = static_cast<size_t>(width_) * height_;
  weight_.resize(n);
  cdf_.resize(n);
  double running = 0.0;
  double min_lum = std::numeric_limits<double>::infinity(), max_lum = 0.0;
  for (int y = 0; y < height_; ++y) {
    const double omega = TexelSolidAngle(y, width_, height_);
    for (int x = 0; x < width_; ++x) {
      const double lum = std::max(0.0, Luminance(env.Texel(x, y)));
      min_lum = std::min(min_lum, lum);
      max_lum = std::max(max_lum, lum);
      const size_t i = static_cast<size_t>(y) * width_ + x;
      weight_[i] = lum * omega;
      running += weight_[i];
      cdf_[i] = running;
    }
  }
  total_ = running;
  if (total_ > 0.0 && min_lum == max_lum) {
    cosine_fraction_ = 1.0;  // constant dome: rounding must not leave the pure cosine path
  } else if (total_ > 0.0) {
    cosine_fraction_ = std::clamp(min_lum * 4.0 * kPi / total_, kMinCosineFraction, 1.0);
  }
}

Vec3 EnvDistribution::Sample(double u1, double u2, double u3) const {
  const double target = u1 * total_;
  size_t i = static_cast<size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), target) - cdf_.begin());
  i = std::min(i, cdf_.size() - 1);
  while (weight_[i] <= 0.0 && i > 0) --i;  // guard against landing on an empty tail
  const int x = static_cast<int>(i % width_), y = static_cast<int>(i / width_);
  const double phi = ((x + u2) / width_ - 0.5) * 2.0 * kPi;
  const double c0 = std::cos(kPi * y / height_), c1 = std::cos(kPi * (y + 1) / height_);
  const double z = c0 + (c1 - c0) * u3;
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

double EnvDistribution::Pdf(const Vec3& direction) const {
  if (total_ <= 0.0) return 0.0;
  int x, y;
  const int i = TexelIndex(direction, width_, height_, x, y);
  return weight_[i] / total_ / TexelSolidAngle(y, width_, height_);
}

}  // namespace twinlight
