#include "twinlight/panorama/panorama.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "twinlight/common/float_buffer.h"
#include "twinlight/common/parallel.h"
#include "twinlight/common/png_io.h"
#include "twinlight/envlight/env_map.h"

namespace twinlight {
namespace {

constexpr float kSky = std::numeric_limits<float>::infinity();
constexpr float kSkyOnDisk = -1.0f;
// Fixed-point scale for splat sums: integer adds commute exactly.
constexpr double kFixedScale = 4294967296.0;  // 2^32
constexpr int kCoarseSweepCap = 20000;

struct Level {
  Image values;
  std::vector<char> known;
};

int Wrap(int x, int w) { return (x % w + w) % w; }

// Red-black Gauss-Seidel sweeps over unknown texels. Returns the sweep count.
int Diffuse(Level& level, int iterations, double tolerance) {
  Image& img = level.values;
  const int w = img.width, h = img.height, c = img.channels;
  std::vector<double> row_max(h);
  int sweep = 0;
  while (iterations < 0 || sweep < iterations) {
    double largest = 0.0;
    for (int color = 0; color < 2; ++color) {
      ParallelFor(0, h, [&](int y) {
        double m = color == 0 ? 0.0 : row_max[y];
        const int up = std::max(0, y - 1), down = std::min(h - 1, y + 1);
        for (int x = (y + color) % 2; x < w; x += 2) {
          if (level.known[static_cast<size_t>(y) * w + x]) continue;
          const int left = Wrap(x - 1, w), right = Wrap(x + 1, w);
          for (int k = 0; k < c; ++k) {
            const float v = 0.25f * (img.at(left, y, k) + img.at(right, y, k) + img.at(x, up, k) +
                                     img.at(x, down, k));
            m = std::max(m, static_cast<double>(std::abs(v - img.at(x, y, k))));
            img.at(x, y, k) = v;
          }
        }
        row_max[y] = m;
      });
    }
    for (double m : row_max) largest = std::max(largest, m);
    ++sweep;
    if (iterations < 0 && (largest < tolerance || sweep >= kCoarseSweepCap)) break;
  }
  return sweep;
}

// Fills unknown texels of `level` in place, starting from a coarser copy.
void FillLevel(Level& level, int iterations, double tolerance) {
  const int w = level.values.width, h = level.values.height, c = level.values.channels;
  if (std::all_of(level.known.begin(), level.known.end(), [](char k) { return k != 0; })) return;
  if (h <= 2 || w <= 4) {
    std::vector<double> mean(c, 0.0);
    int n = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (level.known[static_cast<size_t>(y) * w + x]) {
          for (int k = 0; k < c; ++k) mean[k] += level.values.at(x, y, k);
          ++n;
        }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (!level.known[static_cast<size_t>(y) * w + x]) {
          for (int k = 0; k < c; ++k) level.values.at(x, y, k) = static_cast<float>(mean[k] / n);
        }
  } else {
    Level coarse;
    const int cw = (w + 1) / 2, ch = (h + 1) / 2;
    coarse.values = Image(cw, ch, c);
    coarse.known.assign(static_cast<size_t>(cw) * ch, 0);
    for (int y = 0; y < ch; ++y) {
      for (int x = 0; x < cw; ++x) {
        std::vector<double> sum(c, 0.0);
        int n = 0;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const int fx = 2 * x + dx, fy = 2 * y + dy;
            if (fx >= w || fy >= h || !level.known[static_cast<size_t>(fy) * w + fx]) continue;
            for (int k = 0; k < c; ++k) sum[k] += level.values.at(fx, fy, k);
            ++n;
          }
        if (n == 0) continue;
        coarse.known[static_cast<size_t>(y) * cw + x] = 1;
        for (int k = 0; k < c; ++k) coarse.values.at(x, y, k) = static_cast<float>(sum[k] / n);
      }
    }
    FillLevel(coarse, -1, tolerance);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (!level.known[static_cast<size_t>(y) * w + x]) {
          for (int k = 0; k < c; ++k) level.values.at(x, y, k) = coarse.values.at(x / 2, y / 2, k);
        }
  }
  Diffuse(level, iterations, tolerance);
}

}  // namespace

DepthMap RenderDepth(const TriangleMesh& mesh, const Bvh& bvh, const CameraModel& camera) {
  ValidateCamera(camera);
  DepthMap depth(camera.width, camera.height, 1, kSky);
  ParallelFor(0, camera.height, [&](int y) {
    for (int x = 0; x < camera.width; ++x) {
      const auto hit = Intersect(bvh, mesh, camera.PixelRay(x, y));
      if (hit) depth.at(x, y, 0) = static_cast<float>(hit->t);
    }
  });
  return depth;
}

void WriteDepthMap(const std::string& path, const DepthMap& depth) {
  Require(depth.channels == 1, "depth map must have one channel");
  Image disk = depth;
  for (float& v : disk.data) {
    if (v == kSky) {
      v = kSkyOnDisk;
    } else {
      Require(std::isfinite(v) && v > 0.0f, "depth values must be > 0 or sky");
    }
  }
  WriteFloatBuffer(path, disk);
}

DepthMap ReadDepthMap(const std::string& path) {
  DepthMap depth = ReadFloatBuffer(path);
  if (depth.channels != 1) throw IoError(path + ": depth map must have one channel");
  for (float& v : depth.data) {
    if (v == kSkyOnDisk) {
      v = kSky;
    } else if (!(v > 0.0f)) {
      throw IoError(path + ": depth values must be > 0 or -1 for sky");
    }
  }
  return depth;
}

Image Panorama::Mask() const {
  Image mask(image.width, image.height, 1);
  for (size_t i = 0; i < count.size(); ++i) mask.data[i] = count[i] > 0 ? 1.0f : 0.0f;
  return mask;
}

Panorama Stitch(const std::vector<Image>& images, const std::vector<DepthMap>& depths,
                const std::vector<CameraModel>& cameras, int pano_height,
                std::optional<Vec3> origin) {
  Require(images.size() == depths.size() && images.size() == cameras.size(),
          "stitch needs equal numbers of images, depths and cameras");
  Require(!cameras.empty(), "stitch needs at least one camera");
  Require(pano_height >= 1, "panorama height must be >= 1");
  for (size_t i = 0; i < cameras.size(); ++i) {
    ValidateCamera(cameras[i]);
    const std::string tag = "stitch input " + std::to_string(i);
    Require(images[i].channels == 3, tag + ": image must be RGB");
    Require(images[i].width == cameras[i].width && images[i].height == cameras[i].height,
            tag + ": image size differs from its camera");
    Require(depths[i].channels == 1 && depths[i].SameSize(images[i]),
            tag + ": depth map size differs from its image");
    for (float v : images[i].data) Require(v >= 0.0f && v <= 1.0f, tag + ": image values must lie in [0, 1]");
  }
  const Vec3 o = origin.value_or(cameras.front().Center());
  const int ph = pano_height, pw = 2 * pano_height;
  const size_t texels = static_cast<size_t>(pw) * ph;
  std::vector<std::atomic<int64_t>> sums(texels * 3);
  std::vector<std::atomic<uint32_t>> counts(texels);
  for (size_t i = 0; i < cameras.size(); ++i) {
    const CameraModel& cam = cameras[i];
    ParallelFor(0, cam.height, [&](int y) {
      for (int x = 0; x < cam.width; ++x) {
        const Vec3 d = cam.Direction(x + 0.5, y + 0.5);
        const float depth = depths[i].at(x, y, 0);
        Vec3 dir = d;
        if (depth != kSky) {
          dir = cam.Center() + static_cast<double>(depth) * d - o;
          const double len = dir.norm();
          if (!(len > 0.0)) continue;
          dir /= len;
        }
        const PixelCoord p = DirToPixel(dir, pw, ph);
        const int tx = Wrap(static_cast<int>(std::floor(p.u)), pw);
        const int ty = std::clamp(static_cast<int>(std::floor(p.v)), 0, ph - 1);
        const size_t t = static_cast<size_t>(ty) * pw + tx;
        for (int k = 0; k < 3; ++k) {
          sums[t * 3 + k].fetch_add(std::llround(images[i].at(x, y, k) * kFixedScale),
                                    std::memory_order_relaxed);
        }
        counts[t].fetch_add(1, std::memory_order_relaxed);
      }
    });
  }
  Panorama pano;
  pano.image = Image(pw, ph, 3);
  pano.count.resize(texels);
  for (size_t t = 0; t < texels; ++t) {
    const uint32_t n = counts[t].load();
    pano.count[t] = n;
    if (n == 0) continue;
    for (int k = 0; k < 3; ++k) {
      pano.image.data[t * 3 + k] =
          static_cast<float>(static_cast<double>(sums[t * 3 + k].load()) / kFixedScale / n);
    }
  }
  return pano;
}

Image FillHoles(const Panorama& pano, const FillOptions& options) {
  Require(pano.count.size() == pano.image.PixelCount(), "panorama counts do not match its image");
  Require(options.tolerance > 0.0, "fill tolerance must be > 0");
  Require(std::any_of(pano.count.begin(), pano.count.end(), [](uint32_t n) { return n > 0; }),
          "cannot fill a panorama with no observed texels");
  Level level;
  level.values = pano.image;
  level.known.resize(pano.count.size());
  for (size_t i = 0; i < pano.count.size(); ++i) level.known[i] = pano.count[i] > 0;
  FillLevel(level, options.iterations, options.tolerance);
  return level.values;
}

void WritePanorama(const std::string& image_path, const std::string& mask_path,
                   const Panorama& pano) {
  WritePng(image_path, pano.image);
  WritePgm(mask_path, pano.Mask());
}

}  // namespace twinlight
