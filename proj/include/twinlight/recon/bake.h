#ifndef TWINLIGHT_RECON_BAKE_H_
#define TWINLIGHT_RECON_BAKE_H_

#include <vector>

#include "twinlight/common/image.h"
#include "twinlight/geometry/bvh.h"
#include "twinlight/geometry/mesh.h"
#include "twinlight/recon/camera.h"

namespace twinlight {

struct BakeResult {
  TriangleMesh mesh;
  std::vector<bool> unseen;  // per vertex; such vertices get 0.5 grey
};

// Averages bilinear image samples over every camera that sees each vertex
// unoccluded. Images are linear RGB with the camera's size. `bvh` must be
// built over `mesh`.
BakeResult BakeVertexAlbedo(const TriangleMesh& mesh, const std::vector<Image>& images,
                            const std::vector<CameraModel>& cameras, const Bvh& bvh);

// Bilinear lookup at continuous pixel coordinate (u, v); edges clamp.
void SampleBilinear(const Image& image, double u, double v, float* out);

}  // namespace twinlight

#endif  // TWINLIGHT_RECON_BAKE_H_
