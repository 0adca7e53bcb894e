#ifndef TWINLIGHT_PANORAMA_PANORAMA_H_
#define TWINLIGHT_PANORAMA_PANORAMA_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twinlight/common/image.h"
#include "twinlight/geometry/bvh.h"
#include "twinlight/geometry/mesh.h"
#include "twinlight/recon/camera.h"

namespace twinlight {

// One channel of ray distances in meters; +infinity marks sky.
using DepthMap = Image;

// Nearest-hit distance along each pixel-centre ray.
DepthMap RenderDepth(const TriangleMesh& mesh, const Bvh& bvh, const CameraModel& camera);

// Depth files use the float-buffer container with -1 standing for sky.
void WriteDepthMap(const std::string& path, const DepthMap& depth);
DepthMap ReadDepthMap(const std::string& path);

// Equirectangular LDR panorama (H x 2H x 3) with per-texel source counts.
struct Panorama {
  Image image;
  std::vector<uint32_t> count;

  int width() const { return image.width; }
  int height() const { return image.height; }
  bool Observed(int x, int y) const { return count[static_cast<size_t>(y) * image.width + x] > 0; }
  // 1 where observed, 0 elsewhere; single channel.
  Image Mask() const;
};

// Forward-splats every source pixel to the nearest panorama texel seen from
// `origin` (default: the first camera centre) and averages collisions. Images
// are RGB in [0, 1]; sky pixels contribute their pure view direction. The
// result is bit-identical under any camera order or thread count.
Panorama Stitch(const std::vector<Image>& images, const std::vector<DepthMap>& depths,
                const std::vector<CameraModel>& cameras, int pano_height,
                std::optional<Vec3> origin = std::nullopt);

struct FillOptions {
  // Diffusion sweeps at full resolution; negative runs until the largest
  // update falls below `tolerance`.
  int iterations = -1;
  double tolerance = 1e-4;
};

// Harmonic fill of unobserved texels: each becomes the mean of its four
// neighbours (azimuth wraps, pole rows clamp) while observed texels stay
// fixed. A coarse pyramid supplies the starting guess. Throws
// PreconditionError if nothing is observed.
Image FillHoles(const Panorama& pano, const FillOptions& options = {});

// PNG image plus PGM mask (0/255).
void WritePanorama(const std::string& image_path, const std::string& mask_path,
                   const Panorama& pano);

}  // namespace twinlight

#endif  // TWINLIGHT_PANORAMA_PANORAMA_H_
