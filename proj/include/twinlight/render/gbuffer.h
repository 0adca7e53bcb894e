#ifndef TWINLIGHT_RENDER_GBUFFER_H_
#define TWINLIGHT_RENDER_GBUFFER_H_

#include <string>

#include "twinlight/common/image.h"
#include "twinlight/geometry/bvh.h"
#include "twinlight/geometry/mesh.h"
#include "twinlight/recon/camera.h"
#include "twinlight/render/sampler.h"

namespace twinlight {

// Channel layout of the 8-channel buffer.
enum GBufferChannel : int {
  kGbPosX = 0,
  kGbPosY = 1,
  kGbPosZ = 2,
  kGbDepth = 3,
  kGbNormalX = 4,
  kGbNormalY = 5,
  kGbNormalZ = 6,
  kGbAo = 7,
  kGbChannels = 8,
};

// Per-pixel surface data for one camera. Sky pixels have depth +infinity,
// zero position and normal, and ao = 1. `albedo` (RGB k_d at the hit, zero on
// sky) rides alongside for shading and is not one of the 8 channels.
struct GBuffer {
  Image buffer;
  Image albedo;
  CameraModel camera;

  bool IsSky(int x, int y) const { return buffer.at(x, y, kGbDepth) == kSkyDepth; }
  Vec3 Position(int x, int y) const;
  Vec3 Normal(int x, int y) const;
  Vec3 Albedo(int x, int y) const;

  static constexpr float kSkyDepth = std::numeric_limits<float>::infinity();
};

// Nearest-hit position, depth and interpolated normal at each pixel centre;
// ao is left at 1.
GBuffer ComputeGBuffer(const TriangleMesh& mesh, const Bvh& bvh, const CameraModel& camera);

// Fills the ao channel: unoccluded fraction of cosine-distributed rays from
// each hit (offset 1e-4 x scene diameter along the normal, reach = diameter).
void ComputeAmbientOcclusion(GBuffer& gbuffer, const TriangleMesh& mesh, const Bvh& bvh,
                             const SamplerConfig& sampler);

// Scene diameter used for ray offsets and AO reach: the bounds diagonal.
double SceneDiameter(const TriangleMesh& mesh);

// 8-channel float-buffer file; sky depth is stored as -1.
void WriteGBuffer(const std::string& path, const GBuffer& gbuffer);
// Reads the 8 channels; albedo and camera are left empty.
GBuffer ReadGBuffer(const std::string& path);

}  // namespace twinlight

#endif  // TWINLIGHT_RENDER_GBUFFER_H_
