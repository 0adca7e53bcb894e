#ifndef TWINLIGHT_RELIGHT_BUNDLE_H_
#define TWINLIGHT_RELIGHT_BUNDLE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twinlight/geometry/bvh.h"
#include "twinlight/geometry/mesh.h"
#include "twinlight/relight/relight.h"
#include "twinlight/render/sampler.h"

namespace twinlight {

struct BundleMeta {
  std::string pair = "sim-sim";  // sim-sim | identity | sim-real | frame
  int frame = 0;
  uint64_t seed = 0;
  int spp = 0;
  bool captured_source = false;  // source is a captured image, not a render
};

struct RelightBundle {
  RelightInput input;
  Image label;  // empty when no label exists
  BundleMeta meta;
};

// Directory layout: source.fb, gbuffer.fb, s_src.fb, s_tgt.fb, env_src.hdr,
// env_tgt.hdr, label.fb (optional) and meta. The meta text carries the camera
// with exact rotation entries so sky pixels reproduce bit for bit.
void WriteBundle(const std::string& dir, const RelightBundle& bundle);
RelightBundle ReadBundle(const std::string& dir);

// Renders the frame under both domes and emits the sim-sim pair (label =
// shaded under the target dome) and the identity pair (label = source). A
// supplied real image adds a sim-real pair labelled with it.
std::vector<RelightBundle> MakeTrainingPairs(const TriangleMesh& mesh, const Bvh& bvh,
                                             const CameraModel& camera, const EnvMap& env_source,
                                             const EnvMap& env_target, const SamplerConfig& sampler,
                                             const std::optional<Image>& real_image = std::nullopt);

// Dome after an RGBE encode/decode, i.e. what an .hdr file holds.
EnvMap QuantizeRgbe(const EnvMap& env);

}  // namespace twinlight

#endif  // TWINLIGHT_RELIGHT_BUNDLE_H_
