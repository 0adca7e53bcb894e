// Acceptance suite: one PASS/FAIL line per numbered criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "shadow_oracle.h"
#include "twinlight/common/rng.h"
#include "twinlight/envlight/augment.h"
#include "twinlight/envlight/env_map.h"
#include "twinlight/envlight/sky.h"
#include "twinlight/envlight/solar.h"
#include "twinlight/geometry/decimate.h"
#include "twinlight/geometry/marching_cubes.h"
#include "twinlight/panorama/panorama.h"
#include "twinlight/recon/fit_sdf.h"
#include "twinlight/relight/relight.h"
#include "twinlight/render/gbuffer.h"
#include "twinlight/render/shading.h"

namespace twinlight {
namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void SetThreads(int n) { setenv("THREADS", std::to_string(n).c_str(), 1); }

Vec3 RandomUnit(CounterRng& rng) {
  const double z = 2.0 * rng.Uniform() - 1.0;
  const double phi = 2.0 * kPi * rng.Uniform();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

double AngleBetween(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

double Percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  return v[static_cast<size_t>(q * (v.size() - 1))];
}

CameraModel TopDown(int size, double half_extent = 3.0, double height = 8.0) {
  return MakeCamera(size, size, 2 * std::atan(half_extent / height),
                    LookAt({0, 0, height}, {0, 0, 0}, Vec3::UnitY()));
}

struct World {
  TriangleMesh mesh;
  Bvh bvh;
};

World BoxOnPlane() {
  World w;
  w.mesh = MakeGridPlane(-3, -3, 3, 3, 0, 4, 4);
  w.mesh.Append(MakeBox({-0.5, -0.5, 0}, {0.5, 0.5, 1}));
  w.bvh = Bvh::Build(w.mesh);
  return w;
}

World RandomBoxes(uint64_t draw, CounterRng& rng) {
  World w;
  w.mesh = MakeGridPlane(-4, -4, 4, 4, 0, 4, 4);
  for (int b = 0; b < 3; ++b) {
    const Vec3 lo(5 * rng.Uniform() - 2.5, 5 * rng.Uniform() - 2.5, 0);
    TriangleMesh box = MakeBox(lo, lo + Vec3(0.3 + rng.Uniform(), 0.3 + rng.Uniform(), 0.3 + 2 * rng.Uniform()));
    SetUniformAlbedo(box, Vec3(rng.Uniform(), rng.Uniform(), rng.Uniform()));
    w.mesh.Append(box);
  }
  (void)draw;
  w.bvh = Bvh::Build(w.mesh);
  return w;
}

EnvMap RandomSky(CounterRng& rng, int h = 32) {
  SkyParams p;
  for (int i = 0; i < 8; ++i) p.z[i] = 2 * rng.Uniform() - 1;
  p.f_int = 5 + 60 * rng.Uniform();
  p.f_dir = Vec3(rng.Uniform() - 0.5, rng.Uniform() - 0.5, 0.2 + rng.Uniform()).normalized();
  return DecodeSky(p, h);
}

Outcome Furnace() {
  World w;
  w.mesh = MakeGridPlane(-1, -1, 1, 1, 0, 2, 2);
  w.bvh = Bvh::Build(w.mesh);
  const auto start = std::chrono::steady_clock::now();
  const GBuffer g = ComputeGBuffer(w.mesh, w.bvh, TopDown(256, 0.9));
  const Image img = Shade(w.mesh, w.bvh, g, EnvMap(64, 1.0f), true, {256, 0});
  const double secs = Seconds(start);
  double worst = 0.0;
  for (float v : img.data) worst = std::max(worst, std::abs(v - 0.5) / 0.5);
  return {worst <= 0.02 && secs < 10.0, Fmt("max relative error %.2e, %.2f s at 256x256, 256 spp", worst, secs)};
}

Outcome RelightOracle() {
  double worst = 0.0;
  for (uint64_t draw = 0; draw < 5; ++draw) {
    CounterRng rng(draw, kDomainTest, 21);
    const World w = RandomBoxes(draw, rng);
    const CameraModel cam = MakeCamera(48, 36, 1.5, LookAt({6 * rng.Uniform() - 3, -7, 3.5}, {0, 0, 0.5}));
    const EnvMap src = RandomSky(rng), tgt = RandomSky(rng);
    const SamplerConfig cfg{32, draw};
    RelightInput in;
    in.gbuffer = ComputeGBuffer(w.mesh, w.bvh, cam);
    in.source_maps = ComputeShadowMaps(w.mesh, w.bvh, in.gbuffer, src, cfg);
    in.target_maps = ComputeShadowMaps(w.mesh, w.bvh, in.gbuffer, tgt, cfg);
    in.source = in.source_maps.shadowed;
    in.env_source = src;
    in.env_target = tgt;
    const Image relit = Relight(in);
    const Image oracle = Shade(w.mesh, w.bvh, in.gbuffer, tgt, true, cfg);
    for (int k = 0; k < 3; ++k) {
      double err = 0.0;
      for (size_t i = 0; i < relit.PixelCount(); ++i) err += std::abs(relit.data[3 * i + k] - oracle.data[3 * i + k]);
      worst = std::max(worst, err / relit.PixelCount());
    }
  }
  return {worst < 1e-4, Fmt("worst per-channel mean abs error %.3e over 5 scenes", worst)};
}

Outcome Identity() {
  CounterRng rng(3, kDomainTest, 22);
  const World w = RandomBoxes(3, rng);
  const CameraModel cam = MakeCamera(48, 36, 1.5, LookAt({1, -7, 3.5}, {0, 0, 0.5}));
  const EnvMap env = RandomSky(rng);
  RelightInput in;
  in.gbuffer = ComputeGBuffer(w.mesh, w.bvh, cam);
  in.source_maps = ComputeShadowMaps(w.mesh, w.bvh, in.gbuffer, env, {16, 1});
  in.target_maps = in.source_maps;
  in.source = in.source_maps.shadowed;
  in.env_source = env;
  in.env_target = env;
  const Image out = Relight(in);
  int differ = 0, surface = 0;
  for (int y = 0; y < cam.height; ++y)
    for (int x = 0; x < cam.width; ++x) {
      if (in.gbuffer.IsSky(x, y)) continue;
      ++surface;
      for (int k = 0; k < 3; ++k) differ += out.at(x, y, k) != in.source.at(x, y, k);
    }
  return {differ == 0 && surface > 0, Fmt("%.0f differing values on %.0f surface pixels", differ, surface)};
}

Outcome ShadowRatio() {
  float lo = 1.0f, hi = 0.0f;
  for (uint64_t draw = 0; draw < 100; ++draw) {
    CounterRng rng(draw, kDomainTest, 23);
    const World w = RandomBoxes(draw, rng);
    const CameraModel cam = MakeCamera(16, 16, 1.4, LookAt({5 * rng.Uniform(), -5, 4}, {0, 0, 0}));
    const GBuffer g = ComputeGBuffer(w.mesh, w.bvh, cam);
    const ShadowMaps maps = ComputeShadowMaps(w.mesh, w.bvh, g, RandomSky(rng, 16), {8, draw});
    for (float v : maps.ratio.data) lo = std::min(lo, v), hi = std::max(hi, v);
  }
  World plane;
  plane.mesh = MakeGridPlane(-2, -2, 2, 2, 0, 2, 2);
  plane.bvh = Bvh::Build(plane.mesh);
  const GBuffer g = ComputeGBuffer(plane.mesh, plane.bvh, MakeCamera(24, 16, 1.6, LookAt({0, -1.5, 1}, {0, 0, 0})));
  CounterRng rng(0, kDomainTest, 24);
  const ShadowMaps open = ComputeShadowMaps(plane.mesh, plane.bvh, g, RandomSky(rng), {16, 0});
  const bool ones = std::all_of(open.ratio.data.begin(), open.ratio.data.end(), [](float v) { return v == 1.0f; });
  return {lo >= 0.0f && hi <= 1.0f && ones,
          Fmt("S range [%.4f, %.4f] over 100 draws; occluder-free S == 1: %.0f", lo, hi, ones)};
}

Outcome ShadowGeometry() {
  const World w = BoxOnPlane();
  const GBuffer g = ComputeGBuffer(w.mesh, w.bvh, TopDown(128));
  SkyParams p;
  p.f_int = 5000.0;
  p.f_dir = DirectionFromAngles({30.0, 45.0, 45.0});
  const Vec3 sun = p.f_dir;
  const EnvMap env = DecodeSky(p, 128);
  const Vec3 lo(-0.5, -0.5, 0), hi(0.5, 0.5, 1);
  const ShadowMaps src = ComputeShadowMaps(w.mesh, w.bvh, g, env, {64, 0});
  const ShadowMaps tgt = ComputeShadowMaps(w.mesh, w.bvh, g, RotateEnv(env, kPi), {64, 0});
  const auto a = testing::CompareShadow(g, src, sun, lo, hi);
  const auto b = testing::CompareShadow(g, tgt, Vec3(-sun.x(), -sun.y(), sun.z()), lo, hi);
  const auto centre = TopDown(128).Project(Vec3(0, 0, 0));
  const Eigen::Vector2d c(centre->u, centre->v);
  const double mirror = (b.rendered_centroid - (2 * c - a.rendered_centroid)).norm();
  return {a.iou > 0.95 && b.iou > 0.95 && mirror < 2.0,
          Fmt("IoU %.4f (rotated %.4f), mirrored centroid off by %.3f px", a.iou, b.iou, mirror)};
}

struct SolarReference {
  int64_t timestamp;
  double lat, lon, elevation, azimuth;
};

// Frozen reference ephemeris (apparent elevation with refraction).
const SolarReference kSolar[] = {
    {1592740800, 23.44, 0.0, 89.5623, 90.5168},      {1584705600, 0.0, 0.0, 88.1615, 85.8027},
    {1610735400, 37.77, -122.42, 25.9136, 151.5582}, {1567328400, 51.5, -0.12, 33.2341, 123.0233},
    {1671591600, -33.87, 151.21, 72.0208, 301.0856}, {1688486400, 40.71, -74.0, 68.0832, 139.9512},
    {1523338200, 28.61, 77.21, 61.6248, 132.7569},  {1729087200, 48.86, 2.35, 23.9297, 219.3844},
    {946728000, 0.0, 0.0, 66.9599, 178.0690},        {2071252800, 19.43, -99.13, 69.4806, 252.6288},
};

Outcome Solar() {
  double worst_el = 0.0, worst_az = 0.0;
  for (const auto& r : kSolar) {
    const SolarAngles a = SolarPosition({r.lat, r.lon, r.timestamp});
    worst_el = std::max(worst_el, std::abs(a.elevation - r.elevation));
    // Azimuth is ill-conditioned near the zenith; there the angle between
    // directions is the meaningful error.
    double az = std::remainder(a.azimuth - r.azimuth, 360.0);
    if (r.elevation >= 85.0) az = AngleBetween(DirectionFromAngles(a), DirectionFromAngles({r.azimuth, r.elevation})) * 180 / kPi;
    worst_az = std::max(worst_az, std::abs(az));
  }
  return {worst_el < 0.5 && worst_az < 0.5, Fmt("worst elevation %.4f deg, azimuth %.4f deg", worst_el, worst_az)};
}

Outcome Equirect() {
  const int h = 512;
  CounterRng rng(1, kDomainTest, 25);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 d = RandomUnit(rng);
    const PixelCoord p = DirToPixel(d, 2 * h, h);
    const Vec3 back = TexelDir(std::min(static_cast<int>(p.u), 2 * h - 1), std::min(static_cast<int>(p.v), h - 1), 2 * h, h);
    worst = std::max(worst, AngleBetween(d, back));
  }
  EnvMap env(64);
  for (float& v : env.radiance.data) v = static_cast<float>(rng.Uniform());
  const bool identity = RotateEnv(env, 2 * kPi) == env;
  return {worst < kPi / h && identity, Fmt("worst texel-centre error %.3e rad (bound %.3e); 2pi rotation exact: %.0f",
                                           worst, kPi / h, identity)};
}

Outcome SdfReconstruction() {
  std::vector<RangeSample> samples;
  CounterRng rng(5, kDomainTest, 0);
  for (int i = 0; i < 4096; ++i) {
    const double a = 2.0 * kPi * (i + 0.5) / 4096;
    const Vec3 o(3.0 * std::cos(a), 3.0 * std::sin(a), (i % 3 - 1) * 2.0);
    Vec3 p;
    do {
      p = RandomUnit(rng);
    } while ((o - p).dot(p) <= 0.05);
    RangeSample s;
    s.ray.origin = o;
    s.ray.direction = (p - o).normalized();
    s.depth = (p - o).norm();
    samples.push_back(s);
  }
  const auto start = std::chrono::steady_clock::now();
  const FitResult fit = FitSdf(samples, Aabb{Vec3::Constant(-1.5), Vec3::Constant(1.5)}, {48, 48, 48});
  const double secs = Seconds(start);
  const TriangleMesh mesh = MarchingCubes(fit.grid);
  int close = 0;
  for (const Vec3& v : mesh.vertices) close += std::abs(v.norm() - 1.0) < 0.02;
  const double frac = mesh.empty() ? 0.0 : static_cast<double>(close) / mesh.VertexCount();
  const double p95 = EikonalResidual(fit.grid).p95;
  return {frac >= 0.95 && p95 < 0.2 && secs < 60.0,
          Fmt("%.4f of vertices within 2%%, eikonal p95 %.4f, %.1f s at 48^3", frac, p95, secs)};
}

Outcome Decimation() {
  const SdfGrid grid = SdfGrid::FromFunction(Aabb{Vec3::Constant(-2), Vec3::Constant(2)}, {64, 64, 64},
                                             [](const Vec3& p) { return p.norm() - 1.0; });
  const TriangleMesh mesh = MarchingCubes(grid);
  const size_t target = mesh.TriangleCount() / 5;
  const TriangleMesh out = Decimate(mesh, target);
  CounterRng rng(7, kDomainTest, 0);
  std::vector<double> dist;
  for (const auto& tri : out.triangles)
    for (int s = 0; s < 4; ++s) {
      double b1 = rng.Uniform(), b2 = rng.Uniform();
      if (b1 + b2 > 1) b1 = 1 - b1, b2 = 1 - b2;
      const Vec3 p = (1 - b1 - b2) * out.vertices[tri[0]] + b1 * out.vertices[tri[1]] + b2 * out.vertices[tri[2]];
      dist.push_back(std::abs(p.norm() - 1.0));
    }
  const double p95 = Percentile(dist, 0.95);
  return {out.TriangleCount() <= target && p95 < 0.02,
          Fmt("%.0f -> %.0f triangles, p95 distance %.5f", mesh.TriangleCount(), out.TriangleCount(), p95)};
}

Outcome StitchFidelity() {
  const int h = 128;
  EnvMap env(h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < 2 * h; ++x) {
      const Vec3 d = TexelDir(x, y, 2 * h, h);
      const double phi = std::atan2(d.y(), d.x());
      env.at(x, y, 0) = static_cast<float>(0.5 + 0.3 * d.z() + 0.15 * std::sin(3 * phi));
      env.at(x, y, 1) = static_cast<float>(0.4 + 0.2 * d.x() * d.y());
      env.at(x, y, 2) = static_cast<float>(0.6 - 0.25 * d.z() * d.z() + 0.1 * std::cos(2 * phi));
    }
  std::vector<CameraModel> cams;
  std::vector<Image> imgs, depths;
  for (int i = 0; i < 6; ++i) {
    const double yaw = i * kPi / 3;
    cams.push_back(MakeCamera(256, 256, kPi / 2, LookAt(Vec3::Zero(), Vec3(std::cos(yaw), std::sin(yaw), 0))));
    Image img(256, 256, 3);
    for (int y = 0; y < 256; ++y)
      for (int x = 0; x < 256; ++x) {
        const Vec3 v = SampleEnv(env, cams.back().Direction(x + 0.5, y + 0.5));
        for (int k = 0; k < 3; ++k) img.at(x, y, k) = static_cast<float>(v[k]);
      }
    imgs.push_back(img);
    depths.emplace_back(256, 256, 1, std::numeric_limits<float>::infinity());
  }
  const Panorama pano = Stitch(imgs, depths, cams, h);
  double se = 0.0;
  int n = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < 2 * h; ++x) {
      if (!pano.Observed(x, y)) continue;
      for (int k = 0; k < 3; ++k) se += std::pow(pano.image.at(x, y, k) - env.at(x, y, k), 2);
      ++n;
    }
  const double psnr = 10 * std::log10(1.0 / (se / (3.0 * n)));
  // Maximum principle on the stitched panorama and on a sparse random one.
  bool bounded = true;
  auto check = [&](const Panorama& p) {
    float lo = 1e9f, hi = -1e9f;
    for (size_t t = 0; t < p.count.size(); ++t) {
      if (!p.count[t]) continue;
      for (int k = 0; k < 3; ++k) lo = std::min(lo, p.image.data[3 * t + k]), hi = std::max(hi, p.image.data[3 * t + k]);
    }
    const Image out = FillHoles(p);
    for (float v : out.data) bounded = bounded && v >= lo && v <= hi;
  };
  check(pano);
  Panorama sparse;
  sparse.image = Image(128, 64, 3);
  sparse.count.resize(128 * 64);
  CounterRng rng(8, kDomainTest, 0);
  for (size_t t = 0; t < sparse.count.size(); ++t) {
    sparse.count[t] = rng.Uniform() < 0.1;
    for (int k = 0; k < 3; ++k) sparse.image.data[3 * t + k] = sparse.count[t] ? static_cast<float>(rng.Uniform()) : 5.0f;
  }
  check(sparse);
  return {psnr > 30.0 && bounded, Fmt("masked PSNR %.2f dB; maximum principle holds: %.0f", psnr, bounded)};
}

Outcome Determinism() {
  const World w = BoxOnPlane();
  const CameraModel cam = MakeCamera(32, 24, 1.2, LookAt({4, -4, 3}, {0, 0, 0.3}));
  CounterRng rng(11, kDomainTest, 26);
  const EnvMap env = RandomSky(rng);
  std::vector<RangeSample> samples;
  for (int i = 0; i < 256; ++i) {
    const Vec3 o = 3.0 * RandomUnit(rng);
    RangeSample s;
    s.ray.origin = o;
    s.ray.direction = -o.normalized();
    s.depth = 2.0;
    samples.push_back(s);
  }
  ReconConfig recon;
  recon.iterations = 10;
  recon.seed = 4;
  std::vector<std::vector<Image>> runs;
  for (int threads : {1, 2, 8}) {
    SetThreads(threads);
    GBuffer g = ComputeGBuffer(w.mesh, w.bvh, cam);
    ComputeAmbientOcclusion(g, w.mesh, w.bvh, {16, 9});
    const ShadowMaps maps = ComputeShadowMaps(w.mesh, w.bvh, g, env, {16, 9});
    const FitResult fit = FitSdf(samples, Aabb{Vec3::Constant(-1.5), Vec3::Constant(1.5)}, {16, 16, 16}, recon);
    Image sdf(static_cast<int>(fit.grid.values().size()), 1, 1);
    for (size_t i = 0; i < fit.grid.values().size(); ++i) sdf.data[i] = static_cast<float>(fit.grid.values()[i]);
    runs.push_back({g.buffer, maps.shadowed, maps.unshadowed, maps.ratio, sdf, HdrAugment(env, 17).radiance});
  }
  unsetenv("THREADS");
  const bool same = runs[0] == runs[1] && runs[0] == runs[2];
  return {same, same ? "G-buffer/AO, shadow maps, SDF fit and augmentation identical for THREADS 1, 2, 8"
                     : "outputs differ across thread counts"};
}

Outcome Losses() {
  double worst = 0.0;
  // Relight losses: constant offset and a unit step.
  const RelightLosses offset = ComputeRelightLosses(Image(8, 6, 3, 0.75f), Image(8, 6, 3, 0.5f));
  worst = std::max({worst, std::abs(offset.color - std::sqrt(3.0) * 0.25), std::abs(offset.edge)});
  Image step(10, 6, 3);
  for (int y = 0; y < 6; ++y)
    for (int x = 5; x < 10; ++x)
      for (int k = 0; k < 3; ++k) step.at(x, y, k) = 1.0f;
  const RelightLosses edge = ComputeRelightLosses(step, Image(10, 6, 3));
  const double edge_expect = 2.0 * 6 * 4 * std::sqrt(3.0) / 60;
  worst = std::max({worst, std::abs(edge.edge - edge_expect), std::abs(edge.color - std::sqrt(3.0) / 2),
                    std::abs(edge.total - (edge.color + 400 * edge.edge)), std::abs(edge.lpips)});
  // Sky losses: opposite suns, unit peak error, log-space reconstruction.
  SkyParams a, b;
  b.f_dir = -Vec3::UnitZ();
  b.f_int = std::exp(1.0) - 1.0;
  const SkyLosses sky = ComputeSkyLosses(EnvMap(8, 2.0f), b, EnvMap(8, 1.0f), a);
  worst = std::max({worst, std::abs(sky.angular - 180.0), std::abs(sky.peak - 1.0),
                    std::abs(sky.recon - std::pow(std::log(3.0) - std::log(2.0), 2))});
  const LossWeights w;
  const bool defaults = w.lambda_edge == 400.0 && w.lambda_lpips == 1.0;
  return {worst < 1e-6 && defaults, Fmt("worst closed-form deviation %.2e; default weights ok: %.0f", worst, defaults)};
}

}  // namespace
}  // namespace twinlight

int main() {
  using namespace twinlight;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"furnace", Furnace},
      {"relight oracle equivalence", RelightOracle},
      {"identity self-consistency", Identity},
      {"shadow ratio invariant", ShadowRatio},
      {"shadow geometry", ShadowGeometry},
      {"solar position", Solar},
      {"equirectangular round trip", Equirect},
      {"sdf reconstruction", SdfReconstruction},
      {"decimation", Decimation},
      {"stitch fidelity", StitchFidelity},
      {"determinism", Determinism},
      {"loss suite", Losses},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2zu %-28s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
