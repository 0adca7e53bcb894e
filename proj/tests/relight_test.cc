#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"
#include "twinlight/common/kv_text.h"
#include "twinlight/common/rng.h"
#include "twinlight/envlight/sky.h"
#include "twinlight/relight/bundle.h"
#include "twinlight/relight/relight.h"

namespace twinlight {
namespace {

struct Frame {
  TriangleMesh mesh;
  Bvh bvh;
  CameraModel camera;
  GBuffer gbuffer;
};

Frame RandomFrame(uint64_t draw, int size = 32) {
  CounterRng rng(draw, kDomainTest, 11);
  Frame f;
  f.mesh = MakeGridPlane(-4, -4, 4, 4, 0, 4, 4);
  for (int b = 0; b < 3; ++b) {
    const Vec3 lo(5 * rng.Uniform() - 2.5, 5 * rng.Uniform() - 2.5, 0);
    TriangleMesh box = MakeBox(lo, lo + Vec3(0.3 + rng.Uniform(), 0.3 + rng.Uniform(), 0.3 + 2 * rng.Uniform()));
    SetUniformAlbedo(box, Vec3(rng.Uniform(), rng.Uniform(), rng.Uniform()));
    f.mesh.Append(box);
  }
  f.bvh = Bvh::Build(f.mesh);
  f.camera = MakeCamera(size, size * 3 / 4, 1.5, LookAt({6 * rng.Uniform() - 3, -7, 3.5}, {0, 0, 0.5}));
  f.gbuffer = ComputeGBuffer(f.mesh, f.bvh, f.camera);
  return f;
}

EnvMap RandomSky(uint64_t draw, int salt) {
  CounterRng rng(draw, kDomainTest, 100 + salt);
  SkyParams p;
  for (int i = 0; i < 6; ++i) p.z[i] = 2 * rng.Uniform() - 1;
  p.f_int = 5 + 60 * rng.Uniform();
  p.f_dir = Vec3(rng.Uniform() - 0.5, rng.Uniform() - 0.5, 0.2 + rng.Uniform()).normalized();
  return DecodeSky(p, 32);
}

RelightInput MakeInput(const Frame& f, const EnvMap& src, const EnvMap& tgt, const SamplerConfig& cfg) {
  RelightInput in;
  in.gbuffer = f.gbuffer;
  in.source_maps = ComputeShadowMaps(f.mesh, f.bvh, f.gbuffer, src, cfg);
  in.target_maps = ComputeShadowMaps(f.mesh, f.bvh, f.gbuffer, tgt, cfg);
  in.source = in.source_maps.shadowed;
  in.env_source = src;
  in.env_target = tgt;
  return in;
}

EnvMap Scaled(const EnvMap& env, float s) {
  EnvMap out = env;
  for (float& v : out.radiance.data) v *= s;
  return out;
}

TEST(RelightTest, IdentityLightingIsExact) {
  const Frame f = RandomFrame(1);
  const EnvMap env = RandomSky(1, 0);
  const RelightInput in = MakeInput(f, env, env, {16, 2});
  EXPECT_EQ(Relight(in), in.source);
}

TEST(RelightTest, MatchesRendererUnderTargetDome) {
  for (uint64_t draw = 0; draw < 5; ++draw) {
    const Frame f = RandomFrame(draw);
    const EnvMap tgt = RandomSky(draw, 1);
    const RelightInput in = MakeInput(f, RandomSky(draw, 0), tgt, {32, draw});
    const Image relit = Relight(in);
    const Image oracle = Shade(f.mesh, f.bvh, f.gbuffer, tgt, true, {32, draw});
    for (int k = 0; k < 3; ++k) {
      double err = 0.0;
      for (size_t i = 0; i < relit.PixelCount(); ++i) err += std::abs(relit.data[3 * i + k] - oracle.data[3 * i + k]);
      EXPECT_LT(err / relit.PixelCount(), 1e-4) << "draw " << draw << " channel " << k;
    }
  }
}

TEST(RelightTest, ScalingTargetDomeScalesSurfacePixels) {
  const TriangleMesh plane = MakeGridPlane(-2, -2, 2, 2, 0, 2, 2);
  Frame f;
  f.mesh = plane;
  f.bvh = Bvh::Build(plane);
  f.camera = MakeCamera(16, 16, 1.0, LookAt({0, -3, 2}, {0, 0, 0}));
  f.gbuffer = ComputeGBuffer(f.mesh, f.bvh, f.camera);
  const EnvMap env = RandomSky(4, 0);
  for (float alpha : {2.0f, 0.25f}) {
    const RelightInput in = MakeInput(f, env, Scaled(env, alpha), {16, 0});
    const Image out = Relight(in);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        if (f.gbuffer.IsSky(x, y)) continue;
        for (int k = 0; k < 3; ++k) {
          const double expect = alpha * in.source.at(x, y, k);
          if (expect <= 1e-3) continue;
          ASSERT_NEAR(out.at(x, y, k), expect, 1e-5 * expect);
        }
      }
  }
}

TEST(RelightTest, SkyPixelsShowTargetDome) {
  const Frame f = RandomFrame(2);
  const EnvMap tgt = RandomSky(2, 1);
  const RelightInput in = MakeInput(f, RandomSky(2, 0), tgt, {4, 0});
  const Image out = Relight(in);
  const Image oracle = Shade(f.mesh, f.bvh, f.gbuffer, tgt, true, {4, 0});
  int sky = 0;
  for (int y = 0; y < f.camera.height; ++y)
    for (int x = 0; x < f.camera.width; ++x) {
      if (!f.gbuffer.IsSky(x, y)) continue;
      ++sky;
      for (int k = 0; k < 3; ++k) ASSERT_EQ(out.at(x, y, k), oracle.at(x, y, k));
    }
  EXPECT_GT(sky, 0);
}

TEST(RelightTest, RejectsMismatchedRasters) {
  const Frame f = RandomFrame(3, 16);
  const EnvMap env = RandomSky(3, 0);
  RelightInput in = MakeInput(f, env, env, {4, 0});
  in.target_maps.ratio = Image(5, 5, 3);
  EXPECT_THROW(Relight(in), PreconditionError);
}

// Independent Sobel oracle: explicit replicate padding, then 3x3 correlation.
std::vector<double> SobelOracle(const Image& a, const Image& b) {
  const int w = a.width, h = a.height;
  std::vector<double> pad((w + 2) * (h + 2) * 3);
  for (int y = -1; y <= h; ++y)
    for (int x = -1; x <= w; ++x) {
      const int sx = std::min(std::max(x, 0), w - 1), sy = std::min(std::max(y, 0), h - 1);
      for (int k = 0; k < 3; ++k)
        pad[((y + 1) * (w + 2) + x + 1) * 3 + k] = double(a.at(sx, sy, k)) - b.at(sx, sy, k);
    }
  const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  std::vector<double> norms;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) {
        double gx = 0.0, gy = 0.0;
        for (int j = 0; j < 3; ++j)
          for (int i = 0; i < 3; ++i) {
            const double v = pad[((y + j) * (w + 2) + x + i) * 3 + k];
            gx += kx[j][i] * v;
            gy += kx[i][j] * v;
          }
        s += gx * gx + gy * gy;
      }
      norms.push_back(std::sqrt(s));
    }
  return norms;
}

TEST(RelightLossTest, IdenticalImagesGiveZero) {
  Image img(9, 7, 3);
  CounterRng rng(5, kDomainTest, 0);
  for (float& v : img.data) v = static_cast<float>(rng.Uniform());
  const RelightLosses l = ComputeRelightLosses(img, img);
  EXPECT_EQ(l.color, 0.0);
  EXPECT_EQ(l.edge, 0.0);
  EXPECT_EQ(l.total, 0.0);
  EXPECT_EQ(l.lpips, 0.0);
}

TEST(RelightLossTest, ConstantOffsetHasColorOnly) {
  const float c = 0.25f;
  const RelightLosses l = ComputeRelightLosses(Image(8, 6, 3, 0.5f + c), Image(8, 6, 3, 0.5f));
  EXPECT_NEAR(l.color, std::sqrt(3.0) * c, 1e-6);
  EXPECT_NEAR(l.edge, 0.0, 1e-6);
  EXPECT_NEAR(l.total, l.color, 1e-6);
}

TEST(RelightLossTest, StepEdgeMatchesDirectConvolution) {
  Image step(10, 6, 3);
  for (int y = 0; y < 6; ++y)
    for (int x = 5; x < 10; ++x)
      for (int k = 0; k < 3; ++k) step.at(x, y, k) = 1.0f;
  const Image flat(10, 6, 3);
  const std::vector<double> norms = SobelOracle(step, flat);
  double mean = 0.0;
  for (double n : norms) mean += n;
  mean /= norms.size();
  const RelightLosses l = ComputeRelightLosses(step, flat);
  EXPECT_NEAR(l.edge, mean, 1e-6);
  // Two columns respond with |gx| = 4 in each channel.
  EXPECT_NEAR(l.edge, 2.0 * 6 * 4 * std::sqrt(3.0) / 60, 1e-6);
  EXPECT_NEAR(l.color, std::sqrt(3.0) / 2, 1e-6);
  EXPECT_NEAR(l.total, l.color + 400 * l.edge, 1e-6);
}

TEST(RelightLossTest, RandomImagesAgreeWithOracleAndArePositive) {
  CounterRng rng(6, kDomainTest, 0);
  Image a(13, 11, 3), b(13, 11, 3);
  for (float& v : a.data) v = static_cast<float>(rng.Uniform());
  for (float& v : b.data) v = static_cast<float>(rng.Uniform());
  const std::vector<double> norms = SobelOracle(a, b);
  double mean = 0.0;
  for (double n : norms) mean += n;
  LossWeights weights;
  weights.lambda_edge = 2.0;
  const RelightLosses l = ComputeRelightLosses(a, b, weights);
  EXPECT_NEAR(l.edge, mean / norms.size(), 1e-9);
  EXPECT_GT(l.total, 0.0);
  EXPECT_NEAR(l.total, l.color + 2.0 * l.edge, 1e-12);
  EXPECT_EQ(LossWeights{}.lambda_edge, 400.0);
  EXPECT_EQ(LossWeights{}.lambda_lpips, 1.0);
  weights.lambda_edge = -1;
  EXPECT_THROW(ComputeRelightLosses(a, b, weights), PreconditionError);
  EXPECT_THROW(ComputeRelightLosses(a, Image(13, 10, 3)), PreconditionError);
}

TEST(TrainingPairTest, PairsAndBundleRoundTrip) {
  const auto dir = testing::ScratchDir();
  const Frame f = RandomFrame(7);
  const EnvMap src = RandomSky(7, 0), tgt = RandomSky(7, 1);
  const auto pairs = MakeTrainingPairs(f.mesh, f.bvh, f.camera, src, tgt, {16, 3});
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].meta.pair, "sim-sim");
  EXPECT_EQ(pairs[1].meta.pair, "identity");
  EXPECT_EQ(pairs[1].label, pairs[1].input.source);

  const Image relit = Relight(pairs[0].input);
  double err = 0.0;
  for (size_t i = 0; i < relit.data.size(); ++i) err += std::abs(relit.data[i] - pairs[0].label.data[i]);
  EXPECT_LT(err / relit.data.size(), 1e-4);

  for (size_t p = 0; p < pairs.size(); ++p) {
    const std::string path = (dir / std::to_string(p)).string();
    WriteBundle(path, pairs[p]);
    const RelightBundle back = ReadBundle(path);
    EXPECT_EQ(back.input.source, pairs[p].input.source);
    EXPECT_EQ(back.input.gbuffer.buffer, pairs[p].input.gbuffer.buffer);
    EXPECT_EQ(back.input.env_target, pairs[p].input.env_target);
    EXPECT_EQ(back.input.gbuffer.camera.pose.rotation, f.camera.pose.rotation);
    EXPECT_EQ(back.label, pairs[p].label);
    EXPECT_EQ(back.meta.pair, pairs[p].meta.pair);
    EXPECT_EQ(back.meta.spp, 16);
    EXPECT_EQ(Relight(back.input), Relight(pairs[p].input));
  }
  EXPECT_EQ(Relight(ReadBundle((dir / "1").string()).input), pairs[1].input.source);

  const auto with_real = MakeTrainingPairs(f.mesh, f.bvh, f.camera, src, tgt, {4, 3},
                                           Image(f.camera.width, f.camera.height, 3, 0.3f));
  ASSERT_EQ(with_real.size(), 3u);
  EXPECT_EQ(with_real[2].meta.pair, "sim-real");
}

TEST(TrainingPairTest, RgbeQuantizationIsIdempotent) {
  const EnvMap once = QuantizeRgbe(RandomSky(9, 0));
  EXPECT_EQ(QuantizeRgbe(once), once);
}

TEST(TrainingPairTest, MalformedMetaReportsLine) {
  const auto dir = testing::ScratchDir();
  const Frame f = RandomFrame(8, 16);
  const EnvMap env = RandomSky(8, 0);
  const auto pairs = MakeTrainingPairs(f.mesh, f.bvh, f.camera, env, env, {4, 0});
  WriteBundle(dir.string(), pairs[0]);
  std::string meta = ReadTextFile((dir / "meta").string());
  meta.replace(meta.find("camera.intrinsics = "), 20, "camera.intrinsics = x ");
  WriteTextFile((dir / "meta").string(), meta);
  try {
    ReadBundle(dir.string());
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_GT(e.line(), 1);
  }
}

}  // namespace
}  // namespace twinlight
