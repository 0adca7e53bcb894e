#include "twinlight/cli/commands.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "twinlight/cli/estimate_sky.h"
#include "twinlight/cli/manifest.h"
#include "twinlight/cli/sdf_io.h"
#include "twinlight/common/float_buffer.h"
#include "twinlight/common/kv_text.h"
#include "twinlight/common/png_io.h"
#include "twinlight/envlight/rgbe_io.h"
#include "twinlight/envlight/tonemap.h"
#include "twinlight/geometry/decimate.h"
#include "twinlight/geometry/marching_cubes.h"
#include "twinlight/geometry/ply_io.h"
#include "twinlight/panorama/panorama.h"
#include "twinlight/recon/bake.h"
#include "twinlight/recon/fit_sdf.h"
#include "twinlight/recon/range_io.h"
#include "twinlight/relight/bundle.h"
#include "twinlight/scene/edits.h"
#include "twinlight/scene/scene_file.h"
#include "twinlight/scene/simulate.h"

namespace twinlight {
namespace {

namespace fs = std::filesystem;

// Failure of a single simulated frame set, carrying the exit code to use.
struct FramesFailed : std::runtime_error {
  FramesFailed(const std::string& what, int code) : std::runtime_error(what), exit_code(code) {}
  int exit_code;
};

std::string Sibling(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir + ": cannot create directory: " + ec.message());
}

std::array<int, 3> Resolution(const std::vector<int>& res) {
  Require(res.size() == 1 || res.size() == 3, "--res takes 1 or 3 values");
  return res.size() == 1 ? std::array<int, 3>{res[0], res[0], res[0]}
                         : std::array<int, 3>{res[0], res[1], res[2]};
}

// ---- options -------------------------------------------------------------

struct FitSdfOptions {
  std::string samples, out, trace;
  std::vector<double> bounds;
  std::vector<int> res{48};
  ReconConfig recon;
};

struct ExtractMeshOptions {
  std::string sdf, out;
  double iso = 0.0;
  double decimate = 1.0;
};

struct BakeOptions {
  std::string mesh, cameras, out;
  std::vector<std::string> images;
};

struct StitchOptions {
  std::vector<std::string> images, depths;
  std::string cameras, out, mask, filled;
  std::vector<double> origin;
  int height = 256;
};

struct EstimateSkyOptions {
  std::string pano, mask, geo, time, out, params;
  double exposure = 1.0;
  int height = 0;
};

struct RenderOptions {
  std::string scene, out;
  int frame = 0;
  int spp = 64;
  uint64_t seed = 0;
};

struct RelightOptions {
  std::string bundle, out, png;
};

struct SimulateCliOptions {
  std::string scene, edits, env_tgt, frames, out;
  int spp = 64;
  uint64_t seed = 0;
};

// ---- commands ------------------------------------------------------------

void RunFitSdf(const FitSdfOptions& o, RunManifest& m) {
  Require(o.bounds.size() == 6, "--bounds takes 6 values: x0 y0 z0 x1 y1 z1");
  Aabb box;
  box.lo = Vec3(o.bounds[0], o.bounds[1], o.bounds[2]);
  box.hi = Vec3(o.bounds[3], o.bounds[4], o.bounds[5]);
  const std::vector<RangeSample> samples = ReadRangeSamples(o.samples);
  const FitResult fit = FitSdf(samples, box, Resolution(o.res), o.recon);
  WriteSdf(o.out, fit.grid);
  m.inputs = {o.samples};
  m.outputs = {o.out};
  if (!o.trace.empty()) {
    WriteLossTrace(o.trace, fit.trace);
    m.outputs.push_back(o.trace);
  }
  m.seeds["seed"] = o.recon.seed;
  const EikonalStats eik = EikonalResidual(fit.grid);
  m.notes.push_back("iterations run: " + std::to_string(fit.trace.size() - 1));
  m.notes.push_back("final loss: " + FormatDouble(fit.trace.back().total));
  m.notes.push_back("eikonal p95: " + FormatDouble(eik.p95));
}

void RunExtractMesh(const ExtractMeshOptions& o, RunManifest& m) {
  Require(o.decimate > 0.0 && o.decimate <= 1.0, "--decimate must lie in (0, 1]");
  const SdfGrid grid = ReadSdf(o.sdf);
  TriangleMesh mesh = MarchingCubes(grid, o.iso);
  if (mesh.empty()) {
    std::cerr << "twinlight: warning: no surface at iso " << o.iso << "; writing an empty mesh\n";
    m.notes.push_back("empty mesh");
  } else if (o.decimate < 1.0) {
    const size_t target = std::max<size_t>(4, static_cast<size_t>(o.decimate * mesh.TriangleCount()));
    mesh = Decimate(mesh, target);
  }
  WritePly(o.out, mesh);
  m.inputs = {o.sdf};
  m.outputs = {o.out};
  m.notes.push_back("triangles: " + std::to_string(mesh.TriangleCount()));
}

void RunBake(const BakeOptions& o, RunManifest& m) {
  const TriangleMesh mesh = ReadPly(o.mesh);
  const std::vector<CameraModel> cams = ReadCameraList(o.cameras);
  Require(cams.size() == o.images.size(), "need one camera per image");
  std::vector<Image> images;
  for (const std::string& p : o.images) images.push_back(ReadPng(p));
  const BakeResult r = BakeVertexAlbedo(mesh, images, cams, Bvh::Build(mesh));
  WritePly(o.out, r.mesh);
  m.inputs = {o.mesh, o.cameras};
  m.inputs.insert(m.inputs.end(), o.images.begin(), o.images.end());
  m.outputs = {o.out};
  m.notes.push_back("unseen vertices: " + std::to_string(std::count(r.unseen.begin(), r.unseen.end(), true)));
}

void RunStitch(const StitchOptions& o, RunManifest& m) {
  Require(o.origin.empty() || o.origin.size() == 3, "--origin takes 3 values");
  const std::vector<CameraModel> cams = ReadCameraList(o.cameras);
  std::vector<Image> images, depths;
  for (const std::string& p : o.images) images.push_back(ReadPng(p));
  for (const std::string& p : o.depths) depths.push_back(ReadDepthMap(p));
  std::optional<Vec3> origin;
  if (!o.origin.empty()) origin = Vec3(o.origin[0], o.origin[1], o.origin[2]);
  const Panorama pano = Stitch(images, depths, cams, o.height, origin);
  const std::string mask = o.mask.empty() ? Sibling(o.out, "_mask.pgm") : o.mask;
  WritePanorama(o.out, mask, pano);
  m.inputs = {o.cameras};
  m.inputs.insert(m.inputs.end(), o.images.begin(), o.images.end());
  m.inputs.insert(m.inputs.end(), o.depths.begin(), o.depths.end());
  m.outputs = {o.out, mask};
  if (!o.filled.empty()) {
    WritePng(o.filled, FillHoles(pano));
    m.outputs.push_back(o.filled);
  }
}

GeoTime ParseGeo(const std::string& geo, const std::string& time) {
  std::string text = geo;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  GeoTime g;
  std::string rest;
  if (!(in >> g.latitude >> g.longitude) || (in >> rest)) {
    throw PreconditionError("--geo expects \"latitude,longitude\" in degrees, got '" + geo + "'");
  }
  Require(std::abs(g.latitude) <= 90.0 && std::abs(g.longitude) <= 180.0, "--geo out of range");
  g.timestamp = ParseUtcTimestamp(time);
  return g;
}

void RunEstimateSky(const EstimateSkyOptions& o, RunManifest& m) {
  Require(o.geo.empty() == o.time.empty(), "--geo and --time go together");
  const Image ldr = ReadPng(o.pano);
  const Image mask = ReadPgm(o.mask);
  Require(mask.SameSize(ldr), "mask size differs from the panorama");
  Require(ldr.width == 2 * ldr.height, "panorama must be 2H x H");
  Panorama pano;
  pano.image = ldr;
  pano.count.resize(ldr.PixelCount());
  for (size_t i = 0; i < pano.count.size(); ++i) pano.count[i] = mask.data[i] > 0.5f ? 1 : 0;
  SkyEstimateOptions opt;
  opt.exposure = o.exposure;
  opt.dome_height = o.height;
  if (!o.geo.empty()) opt.geo = ParseGeo(o.geo, o.time);
  const SkyEstimate est = EstimateSky(pano, opt);
  WriteEnvMap(o.out, est.dome);
  const std::string params = o.params.empty() ? Sibling(o.out, ".sky.txt") : o.params;
  WriteTextFile(params, "# estimated sky\n" + FormatSkyParams(est.params, est.dome.height()));
  m.inputs = {o.pano, o.mask};
  m.outputs = {o.out, params};
  m.notes.push_back("gradient fit rms: " + FormatDouble(est.fit_rms));
}

void RunRender(const RenderOptions& o, RunManifest& m) {
  const Scene scene = ReadScene(o.scene);
  const SamplerConfig sampler{o.spp, o.seed};
  ValidateSamplerConfig(sampler);
  const FrameGeometry geo = BuildFrameGeometry(scene, o.frame);
  const Bvh bvh = Bvh::Build(geo.mesh);
  GBuffer g = ComputeGBuffer(geo.mesh, bvh, scene.CameraAt(o.frame));
  ComputeAmbientOcclusion(g, geo.mesh, bvh, sampler);
  const ShadowMaps maps = ComputeShadowMaps(geo.mesh, bvh, g, scene.env, sampler);
  EnsureDir(o.out);
  const fs::path dir(o.out);
  WriteFloatBuffer((dir / "image.fb").string(), maps.shadowed);
  WriteGBuffer((dir / "gbuffer.fb").string(), g);
  WriteShadowMaps((dir / "shadow.fb").string(), maps);
  WriteFloatBuffer((dir / "albedo.fb").string(), g.albedo);
  WritePng((dir / "preview.png").string(), TonemapLdr(maps.shadowed));
  m.inputs = {o.scene};
  for (const char* f : {"image.fb", "gbuffer.fb", "shadow.fb", "albedo.fb", "preview.png"})
    m.outputs.push_back((dir / f).string());
  m.seeds["seed"] = o.seed;
}

void RunRelight(const RelightOptions& o, RunManifest& m) {
  const RelightBundle b = ReadBundle(o.bundle);
  const Image out = Relight(b.input);
  WriteFloatBuffer(o.out, out);
  m.inputs = {o.bundle};
  m.outputs = {o.out};
  if (!o.png.empty()) {
    WritePng(o.png, TonemapLdr(out));
    m.outputs.push_back(o.png);
  }
  m.seeds["seed"] = b.meta.seed;
  m.approximate = b.meta.captured_source;
  if (m.approximate) m.notes.push_back("source is a captured image; relighting is approximate");
}

EnvMap ReadTargetDome(const std::string& path) {
  if (fs::path(path).extension() == ".hdr") return ReadEnvMap(path);
  return ReadLightingFile(path);
}

void RunSimulate(const SimulateCliOptions& o, RunManifest& m) {
  Scene scene = ReadScene(o.scene);
  m.inputs = {o.scene};
  if (!o.edits.empty()) {
    scene = ApplyEdits(scene, ReadEditScript(o.edits, scene));
    m.inputs.push_back(o.edits);
  }
  SimulateOptions opt;
  opt.sampler = {o.spp, o.seed};
  if (!o.frames.empty()) opt.frames = ParseFrameList(o.frames);
  if (!o.env_tgt.empty()) {
    opt.env_target = ReadTargetDome(o.env_tgt);
    m.inputs.push_back(o.env_tgt);
  }
  EnsureDir(o.out);
  opt.out_dir = o.out;
  const SimulationReport report = Simulate(scene, opt);
  for (const FrameResult& f : report.frames) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04d", f.frame);
    m.outputs.push_back((fs::path(o.out) / name).string());
    m.outputs.push_back((fs::path(o.out) / (std::string(name) + ".png")).string());
  }
  m.seeds["seed"] = o.seed;
  if (!report.failures.empty()) {
    bool io = false;
    std::string what;
    for (const FrameFailure& f : report.failures) {
      m.notes.push_back("failed: " + f.message);
      what += (what.empty() ? "" : "; ") + f.message;
      io = io || f.io;
    }
    throw FramesFailed(std::to_string(report.failures.size()) + " frame(s) failed: " + what,
                       io ? kExitIo : kExitPrecondition);
  }
}

// ---- plumbing --------------------------------------------------------------

std::map<std::string, std::string> ResolvedConfig(const CLI::App& sub) {
  std::map<std::string, std::string> out;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->count() > 0) {
      std::string v;
      for (const std::string& r : opt->results()) v += (v.empty() ? "" : " ") + r;
      out[name] = v;
    } else {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

int Fail(int code, const std::string& what) {
  std::cerr << "twinlight: error: " << what << "\n";
  return code;
}

}  // namespace

std::vector<int> ParseFrameList(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) {
    size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || v < 0) throw PreconditionError("bad frame list '" + text + "'");
    return v;
  };
  while (std::getline(ss, item, ',')) {
    const size_t dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(number(item));
    } else {
      const int a = number(item.substr(0, dash)), b = number(item.substr(dash + 1));
      Require(a <= b, "bad frame range '" + item + "'");
      for (int f = a; f <= b; ++f) out.push_back(f);
    }
  }
  Require(!out.empty(), "empty frame list");
  return out;
}

std::vector<std::string> MergeConfigFile(const std::vector<std::string>& args) {
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const KvDocument doc = ParseKvFile(path);
  std::vector<std::string> out = args;
  const KvSection* settings = doc.First("settings");
  if (!settings) return out;
  for (const KvEntry& e : settings->entries) {
    const std::string flag = "--" + e.key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given || e.key == "config") continue;
    out.push_back(flag);
    std::stringstream ss(e.value);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
  }
  return out;
}

int RunCli(const std::vector<std::string>& raw_args) {
  CLI::App app{"Lighting-aware digital twin pipeline: reconstruction, sky estimation, rendering and relighting."};
  app.name("twinlight");
  app.set_version_flag("--version", VersionString());
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto config_opt = [](CLI::App* sub) {
    static std::string ignored;
    sub->add_option("--config", ignored, "scene-format text whose [settings] supply flag defaults");
  };

  FitSdfOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit-sdf", "fit a signed distance grid to range samples");
  fit_cmd->add_option("--samples", fit.samples, "range sample table")->required();
  fit_cmd->add_option("--bounds", fit.bounds, "x0 y0 z0 x1 y1 z1")->required()->expected(6);
  fit_cmd->add_option("--res", fit.res, "nodes per axis (1 or 3 values)")->expected(1, 3);
  fit_cmd->add_option("--out", fit.out, "output SDF1 file")->required();
  fit_cmd->add_option("--trace", fit.trace, "optional per-iteration loss CSV");
  fit_cmd->add_option("--iterations", fit.recon.iterations);
  fit_cmd->add_option("--step-size", fit.recon.step_size);
  fit_cmd->add_option("--lambda-lidar", fit.recon.lambda_lidar);
  fit_cmd->add_option("--lambda-eikonal", fit.recon.lambda_eikonal);
  fit_cmd->add_option("--lambda-freespace", fit.recon.lambda_freespace);
  fit_cmd->add_option("--freespace-samples", fit.recon.freespace_samples);
  fit_cmd->add_option("--freespace-margin", fit.recon.freespace_margin);
  fit_cmd->add_option("--seed", fit.recon.seed);
  config_opt(fit_cmd);

  ExtractMeshOptions ext;
  CLI::App* ext_cmd = app.add_subcommand("extract-mesh", "marching cubes plus optional decimation");
  ext_cmd->add_option("--sdf", ext.sdf, "SDF1 file")->required();
  ext_cmd->add_option("--iso", ext.iso, "iso level");
  ext_cmd->add_option("--decimate", ext.decimate, "fraction of triangles to keep, (0, 1]");
  ext_cmd->add_option("--out", ext.out, "output PLY")->required();
  config_opt(ext_cmd);

  BakeOptions bake;
  CLI::App* bake_cmd = app.add_subcommand("bake-albedo", "project camera images onto mesh vertices");
  bake_cmd->add_option("--mesh", bake.mesh, "input PLY")->required();
  bake_cmd->add_option("--images", bake.images, "PNG images, one per camera")->required();
  bake_cmd->add_option("--cameras", bake.cameras, "camera list")->required();
  bake_cmd->add_option("--out", bake.out, "output PLY")->required();
  config_opt(bake_cmd);

  StitchOptions st;
  CLI::App* st_cmd = app.add_subcommand("stitch", "stitch camera images into an equirectangular panorama");
  st_cmd->add_option("--images", st.images, "PNG images")->required();
  st_cmd->add_option("--depths", st.depths, "depth FB files (-1 = sky)")->required();
  st_cmd->add_option("--cameras", st.cameras, "camera list")->required();
  st_cmd->add_option("--height", st.height, "panorama height H (width 2H)");
  st_cmd->add_option("--origin", st.origin, "projection centre (default: first camera)")->expected(3);
  st_cmd->add_option("--out", st.out, "panorama PNG")->required();
  st_cmd->add_option("--mask", st.mask, "mask PGM (default: <out>_mask.pgm)");
  st_cmd->add_option("--filled", st.filled, "optional hole-filled PNG");
  config_opt(st_cmd);

  EstimateSkyOptions sky;
  CLI::App* sky_cmd = app.add_subcommand("estimate-sky", "fit a parametric HDR sky to an LDR panorama");
  sky_cmd->add_option("--pano", sky.pano, "panorama PNG")->required();
  sky_cmd->add_option("--mask", sky.mask, "mask PGM")->required();
  sky_cmd->add_option("--geo", sky.geo, "latitude,longitude in degrees");
  sky_cmd->add_option("--time", sky.time, "UTC time YYYY-MM-DDTHH:MM[:SS]Z");
  sky_cmd->add_option("--exposure", sky.exposure);
  sky_cmd->add_option("--height", sky.height, "dome height (0: panorama height)");
  sky_cmd->add_option("--out", sky.out, "dome .hdr")->required();
  sky_cmd->add_option("--params", sky.params, "parameter text (default: <out>.sky.txt)");
  config_opt(sky_cmd);

  RenderOptions ren;
  CLI::App* ren_cmd = app.add_subcommand("render", "G-buffer, shadow maps and shaded frame of a scene");
  ren_cmd->add_option("--scene", ren.scene, "scene file")->required();
  ren_cmd->add_option("--frame", ren.frame);
  ren_cmd->add_option("--spp", ren.spp, "samples per pixel");
  ren_cmd->add_option("--seed", ren.seed);
  ren_cmd->add_option("--out", ren.out, "output directory")->required();
  config_opt(ren_cmd);

  RelightOptions rel;
  CLI::App* rel_cmd = app.add_subcommand("relight", "relight a bundle to its target dome");
  rel_cmd->add_option("--bundle", rel.bundle, "bundle directory")->required();
  rel_cmd->add_option("--out", rel.out, "output FB")->required();
  rel_cmd->add_option("--png", rel.png, "optional tonemapped preview");
  config_opt(rel_cmd);

  SimulateCliOptions sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "edit a scene and render relit frame bundles");
  sim_cmd->add_option("--scene", sim.scene, "scene file")->required();
  sim_cmd->add_option("--edits", sim.edits, "edit script");
  sim_cmd->add_option("--env-tgt", sim.env_tgt, "target dome: .hdr or a [lighting] text file");
  sim_cmd->add_option("--frames", sim.frames, "frame list, e.g. 0,2,4-6 (default: all)");
  sim_cmd->add_option("--spp", sim.spp, "samples per pixel");
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--out", sim.out, "output directory")->required();
  config_opt(sim_cmd);

  std::vector<std::string> args;
  try {
    args = MergeConfigFile(raw_args);
  } catch (const PreconditionError& e) {
    return Fail(kExitPrecondition, e.what());
  } catch (const std::exception& e) {
    return Fail(kExitIo, e.what());
  }
  std::vector<std::string> argv_store{"twinlight"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitPrecondition;
  }

  RunManifest manifest;
  manifest.command_line = raw_args;
  std::string manifest_path;
  const auto start = std::chrono::steady_clock::now();
  try {
    CLI::App* sub = app.get_subcommands().front();
    manifest.command = sub->get_name();
    manifest.config = ResolvedConfig(*sub);
    if (sub == fit_cmd) {
      RunFitSdf(fit, manifest);
      manifest_path = fit.out + ".manifest.json";
    } else if (sub == ext_cmd) {
      RunExtractMesh(ext, manifest);
      manifest_path = ext.out + ".manifest.json";
    } else if (sub == bake_cmd) {
      RunBake(bake, manifest);
      manifest_path = bake.out + ".manifest.json";
    } else if (sub == st_cmd) {
      RunStitch(st, manifest);
      manifest_path = st.out + ".manifest.json";
    } else if (sub == sky_cmd) {
      RunEstimateSky(sky, manifest);
      manifest_path = sky.out + ".manifest.json";
    } else if (sub == ren_cmd) {
      RunRender(ren, manifest);
      manifest_path = (fs::path(ren.out) / "manifest.json").string();
    } else if (sub == rel_cmd) {
      RunRelight(rel, manifest);
      manifest_path = rel.out + ".manifest.json";
    } else if (sub == sim_cmd) {
      manifest_path = (fs::path(sim.out) / "manifest.json").string();
      try {
        RunSimulate(sim, manifest);
      } catch (const FramesFailed& e) {
        manifest.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        WriteManifest(manifest_path, manifest);
        return Fail(e.exit_code, e.what());
      }
    }
    manifest.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    WriteManifest(manifest_path, manifest);
  } catch (const PreconditionError& e) {
    return Fail(kExitPrecondition, e.what());
  } catch (const IoError& e) {
    return Fail(kExitIo, e.what());
  } catch (const ParseError& e) {
    return Fail(kExitIo, e.what());
  } catch (const std::exception& e) {
    return Fail(kExitFailure, e.what());
  }
  return kExitOk;
}

}  // namespace twinlight
