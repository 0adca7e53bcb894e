#include "twinlight/scene/simulate.h"

#include <cstdio>
#include <filesystem>

#include "twinlight/common/float_buffer.h"
#include "twinlight/common/png_io.h"
#include "twinlight/envlight/tonemap.h"

namespace twinlight {
namespace {

std::string FrameName(int frame) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04d", frame);
  return buf;
}

}  // namespace

FrameResult SimulateFrame(const Scene& scene, int frame, const SamplerConfig& sampler,
                          const EnvMap& env_source, const EnvMap& env_target) {
  const FrameGeometry geo = BuildFrameGeometry(scene, frame);
  const Bvh bvh = Bvh::Build(geo.mesh);
  const CameraModel& camera = scene.CameraAt(frame);
  GBuffer g = ComputeGBuffer(geo.mesh, bvh, camera);
  ComputeAmbientOcclusion(g, geo.mesh, bvh, sampler);
  FrameResult r;
  r.frame = frame;
  RelightInput& in = r.bundle.input;
  in.source_maps = ComputeShadowMaps(geo.mesh, bvh, g, env_source, sampler);
  in.target_maps = env_target == env_source
                       ? in.source_maps
                       : ComputeShadowMaps(geo.mesh, bvh, g, env_target, sampler);
  in.source = in.source_maps.shadowed;
  in.gbuffer = std::move(g);
  in.env_source = env_source;
  in.env_target = env_target;
  r.bundle.label = in.target_maps.shadowed;
  r.bundle.meta.pair = "frame";
  r.bundle.meta.frame = frame;
  r.bundle.meta.seed = sampler.seed;
  r.bundle.meta.spp = sampler.spp;
  r.relit = Relight(in);
  return r;
}

SimulationReport Simulate(const Scene& scene, const SimulateOptions& options) {
  ValidateScene(scene);
  ValidateSamplerConfig(options.sampler);
  const EnvMap src = QuantizeRgbe(scene.env);
  const EnvMap tgt = options.env_target ? QuantizeRgbe(*options.env_target) : src;
  std::vector<int> frames = options.frames;
  if (frames.empty()) {
    for (int f = 0; f < scene.frame_count; ++f) frames.push_back(f);
  }
  SimulationReport report;
  for (int frame : frames) {
    try {
      FrameResult r = SimulateFrame(scene, frame, options.sampler, src, tgt);
      if (!options.out_dir.empty()) {
        const std::filesystem::path dir = std::filesystem::path(options.out_dir) / FrameName(frame);
        WriteBundle(dir.string(), r.bundle);
        WriteFloatBuffer((dir / "relit.fb").string(), r.relit);
        WritePng((std::filesystem::path(options.out_dir) / (FrameName(frame) + ".png")).string(),
                 TonemapLdr(r.relit));
      }
      report.frames.push_back(std::move(r));
    } catch (const PreconditionError& e) {
      report.failures.push_back({frame, "frame " + std::to_string(frame) + ": " + e.what(), false});
    } catch (const std::exception& e) {
      report.failures.push_back({frame, "frame " + std::to_string(frame) + ": " + e.what(), true});
    }
  }
  return report;
}

}  // namespace twinlight
