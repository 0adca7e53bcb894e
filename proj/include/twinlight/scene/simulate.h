#ifndef TWINLIGHT_SCENE_SIMULATE_H_
#define TWINLIGHT_SCENE_SIMULATE_H_

#include <optional>
#include <string>
#include <vector>

#include "twinlight/relight/bundle.h"
#include "twinlight/scene/scene.h"

namespace twinlight {

struct SimulateOptions {
  std::vector<int> frames;  // empty: every frame
  SamplerConfig sampler;
  std::optional<EnvMap> env_target;  // empty: the scene dome (playback)
  std::string out_dir;               // empty: nothing is written
};

struct FrameResult {
  int frame = 0;
  RelightBundle bundle;  // label = render under the target dome
  Image relit;
};

struct FrameFailure {
  int frame = 0;
  std::string message;
  bool io = false;  // input/output or parse failure rather than a precondition
};

struct SimulationReport {
  std::vector<FrameResult> frames;
  std::vector<FrameFailure> failures;
};

// Renders, shadows and relights each requested frame. Both domes pass
// through RGBE quantisation first so written bundles replay exactly. With
// `out_dir`, frame t goes to frame_%04d/ (bundle plus relit.fb) and
// frame_%04d.png. A failing frame is recorded and the rest still run.
SimulationReport Simulate(const Scene& scene, const SimulateOptions& options);

// One frame, domes used as given.
FrameResult SimulateFrame(const Scene& scene, int frame, const SamplerConfig& sampler,
                          const EnvMap& env_source, const EnvMap& env_target);

}  // namespace twinlight

#endif  // TWINLIGHT_SCENE_SIMULATE_H_
