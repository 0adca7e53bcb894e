#ifndef TWINLIGHT_ENVLIGHT_ENV_MAP_H_
#define TWINLIGHT_ENVLIGHT_ENV_MAP_H_

#include "twinlight/common/image.h"
#include "twinlight/common/vec.h"

namespace twinlight {

// Equirectangular HDR radiance map, H x 2H x 3, linear, non-negative.
// Texel (x, y) covers continuous pixel coordinates [x, x+1) x [y, y+1).
// Row 0 touches the zenith; u = W/2 faces +x (east), u increases toward +y.
struct EnvMap {
  Image radiance;

  EnvMap() = default;
  explicit EnvMap(int height, float fill = 0.0f) : radiance(2 * height, height, 3, fill) {}
  explicit EnvMap(Image image) : radiance(std::move(image)) {}

  int width() const { return radiance.width; }
  int height() const { return radiance.height; }
  float& at(int x, int y, int c) { return radiance.at(x, y, c); }
  float at(int x, int y, int c) const { return radiance.at(x, y, c); }
  Vec3 Texel(int x, int y) const {
    return {radiance.at(x, y, 0), radiance.at(x, y, 1), radiance.at(x, y, 2)};
  }
  bool operator==(const EnvMap&) const = default;
};

// Throws PreconditionError unless W = 2H, 3 channels and all values finite
// and >= 0.
void ValidateEnvMap(const EnvMap& env);

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

// theta = acos(z) -> v = theta / pi * H; phi = atan2(y, x) -> u = (phi / 2pi + 0.5) * W.
PixelCoord DirToPixel(const Vec3& direction, int width, int height);
Vec3 PixelToDir(double u, double v, int width, int height);

// Direction through the centre of texel (x, y).
inline Vec3 TexelDir(int x, int y, int width, int height) {
  return PixelToDir(x + 0.5, y + 0.5, width, height);
}

// Solid angle of one texel in row y.
double TexelSolidAngle(int y, int width, int height);

inline double Luminance(const Vec3& rgb) {
  return 0.2126 * rgb.x() + 0.7152 * rgb.y() + 0.0722 * rgb.z();
}

// Bilinear lookup between texel centres; wraps in azimuth, clamps at poles.
Vec3 SampleEnv(const EnvMap& env, const Vec3& direction);

// Turns the dome about +z by `yaw` radians (counter-clockwise seen from
// above): the radiance formerly arriving from azimuth phi now arrives from
// phi + yaw. Shifts that are whole columns (within 1e-6) are exact copies;
// otherwise adjacent columns are linearly blended, preserving column sums.
EnvMap RotateEnv(const EnvMap& env, double yaw);

// Mirrors columns x -> W-1-x (phi -> -phi).
EnvMap FlipEnv(const EnvMap& env);

struct SunEstimate {
  Vec3 direction = Vec3::UnitZ();
  double intensity = 0.0;
  int x = 0;
  int y = 0;
};

// Brightest-luminance texel; ties go to the smallest row, then column.
SunEstimate ExtractSun(const EnvMap& env);

// Sum of per-texel radiance times solid angle (irradiance-style energy).
Vec3 EnvEnergy(const EnvMap& env);

}  // namespace twinlight

#endif  // TWINLIGHT_ENVLIGHT_ENV_MAP_H_
