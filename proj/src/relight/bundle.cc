#include "twinlight/relight/bundle.h"

#include <filesystem>
#include <iostream>

#include "twinlight/common/float_buffer.h"
#include "twinlight/common/kv_text.h"
#include "twinlight/envlight/rgbe_io.h"

namespace twinlight {
namespace {

namespace fs = std::filesystem;

std::string Join(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

std::string FormatMeta(const RelightBundle& b) {
  const CameraModel& c = b.input.gbuffer.camera;
  std::vector<double> rot;
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) rot.push_back(c.pose.rotation(r, k));
  const Vec3& t = c.pose.translation;
  std::string out = "# relight bundle\n";
  out += "pair = " + b.meta.pair + "\n";
  out += "frame = " + std::to_string(b.meta.frame) + "\n";
  out += "seed = " + std::to_string(b.meta.seed) + "\n";
  out += "spp = " + std::to_string(b.meta.spp) + "\n";
  out += std::string("source = ") + (b.meta.captured_source ? "captured" : "render") + "\n";
  out += std::string("approximate = ") + (b.meta.captured_source ? "true" : "false") + "\n";
  out += "camera.size = " + std::to_string(c.width) + " " + std::to_string(c.height) + "\n";
  out += "camera.intrinsics = " + FormatDoubles({c.fx, c.fy, c.cx, c.cy}) + "\n";
  out += "camera.rotation = " + FormatDoubles(rot) + "\n";
  out += "camera.translation = " + FormatDoubles({t.x(), t.y(), t.z()}) + "\n";
  return out;
}

const KvEntry& Need(const KvDocument& doc, const KvSection& s, const std::string& key) {
  const KvEntry* e = s.Find(key);
  if (!e) throw ParseError(doc.source, s.line, 1, "missing key '" + key + "'");
  return *e;
}

std::vector<double> NeedList(const KvDocument& doc, const KvSection& s, const std::string& key,
                             size_t count) {
  const KvEntry& e = Need(doc, s, key);
  std::vector<double> v = ParseDoubleList(doc.source, e);
  if (v.size() != count) {
    throw ParseError(doc.source, e.line, e.value_column,
                     key + " needs " + std::to_string(count) + " numbers");
  }
  return v;
}

void ParseMeta(const std::string& path, RelightBundle& b) {
  const KvDocument doc = ParseKvFile(path);
  const KvSection* s = doc.First("");
  if (!s) throw ParseError(path, 1, 1, "empty bundle meta");
  b.meta.pair = Need(doc, *s, "pair").value;
  b.meta.frame = static_cast<int>(ParseInt(doc.source, Need(doc, *s, "frame")));
  b.meta.seed = static_cast<uint64_t>(ParseInt(doc.source, Need(doc, *s, "seed")));
  b.meta.spp = static_cast<int>(ParseInt(doc.source, Need(doc, *s, "spp")));
  const KvEntry& src = Need(doc, *s, "source");
  if (src.value != "render" && src.value != "captured") {
    throw ParseError(doc.source, src.line, src.value_column, "source must be render or captured");
  }
  b.meta.captured_source = src.value == "captured";
  const auto size = NeedList(doc, *s, "camera.size", 2);
  const auto k = NeedList(doc, *s, "camera.intrinsics", 4);
  const auto r = NeedList(doc, *s, "camera.rotation", 9);
  const auto t = NeedList(doc, *s, "camera.translation", 3);
  CameraModel& c = b.input.gbuffer.camera;
  c.width = static_cast<int>(size[0]);
  c.height = static_cast<int>(size[1]);
  c.fx = k[0];
  c.fy = k[1];
  c.cx = k[2];
  c.cy = k[3];
  for (int i = 0; i < 9; ++i) c.pose.rotation(i / 3, i % 3) = r[i];
  c.pose.translation = Vec3(t[0], t[1], t[2]);
  try {
    ValidateCamera(c);
  } catch (const PreconditionError& e) {
    throw ParseError(doc.source, s->line, 1, std::string("bad camera: ") + e.what());
  }
}

}  // namespace

EnvMap QuantizeRgbe(const EnvMap& env) {
  return EnvMap(DecodeRgbe(EncodeRgbe(env.radiance), "<memory>"));
}

void WriteBundle(const std::string& dir, const RelightBundle& b) {
  ValidateRelightInput(b.input);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir + ": cannot create bundle directory: " + ec.message());
  WriteFloatBuffer(Join(dir, "source.fb"), b.input.source);
  WriteGBuffer(Join(dir, "gbuffer.fb"), b.input.gbuffer);
  WriteShadowMaps(Join(dir, "s_src.fb"), b.input.source_maps);
  WriteShadowMaps(Join(dir, "s_tgt.fb"), b.input.target_maps);
  WriteEnvMap(Join(dir, "env_src.hdr"), b.input.env_source);
  WriteEnvMap(Join(dir, "env_tgt.hdr"), b.input.env_target);
  if (b.label.PixelCount() > 0) WriteFloatBuffer(Join(dir, "label.fb"), b.label);
  WriteTextFile(Join(dir, "meta"), FormatMeta(b));
}

RelightBundle ReadBundle(const std::string& dir) {
  RelightBundle b;
  b.input.source = ReadFloatBuffer(Join(dir, "source.fb"));
  b.input.gbuffer = ReadGBuffer(Join(dir, "gbuffer.fb"));
  b.input.source_maps = ReadShadowMaps(Join(dir, "s_src.fb"));
  b.input.target_maps = ReadShadowMaps(Join(dir, "s_tgt.fb"));
  b.input.env_source = ReadEnvMap(Join(dir, "env_src.hdr"));
  b.input.env_target = ReadEnvMap(Join(dir, "env_tgt.hdr"));
  if (fs::exists(Join(dir, "label.fb"))) b.label = ReadFloatBuffer(Join(dir, "label.fb"));
  ParseMeta(Join(dir, "meta"), b);
  try {
    ValidateRelightInput(b.input);
  } catch (const PreconditionError& e) {
    throw IoError(dir + ": inconsistent bundle: " + e.what());
  }
  return b;
}

std::vector<RelightBundle> MakeTrainingPairs(const TriangleMesh& mesh, const Bvh& bvh,
                                             const CameraModel& camera, const EnvMap& env_source,
                                             const EnvMap& env_target, const SamplerConfig& sampler,
                                             const std::optional<Image>& real_image) {
  const EnvMap src_env = QuantizeRgbe(env_source), tgt_env = QuantizeRgbe(env_target);
  GBuffer g = ComputeGBuffer(mesh, bvh, camera);
  ComputeAmbientOcclusion(g, mesh, bvh, sampler);
  const ShadowMaps src = ComputeShadowMaps(mesh, bvh, g, src_env, sampler);
  const ShadowMaps tgt = ComputeShadowMaps(mesh, bvh, g, tgt_env, sampler);
  BundleMeta meta;
  meta.seed = sampler.seed;
  meta.spp = sampler.spp;

  std::vector<RelightBundle> pairs;
  RelightBundle sim;
  sim.input = {src.shadowed, g, src, tgt, src_env, tgt_env};
  sim.label = tgt.shadowed;
  sim.meta = meta;
  sim.meta.pair = "sim-sim";
  pairs.push_back(sim);

  RelightBundle identity;
  identity.input = {src.shadowed, g, src, src, src_env, src_env};
  identity.label = src.shadowed;
  identity.meta = meta;
  identity.meta.pair = "identity";
  pairs.push_back(identity);

  if (real_image) {
    Require(real_image->channels == 3 && real_image->SameSize(src.shadowed),
            "real image must be RGB at the camera resolution");
    RelightBundle real = identity;
    real.label = *real_image;
    real.meta.pair = "sim-real";
    pairs.push_back(real);
  } else {
    std::clog << "note: no captured image supplied; sim-real pair skipped\n";
  }
  return pairs;
}

}  // namespace twinlight
