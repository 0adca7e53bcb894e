#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"
#include "twinlight/common/rng.h"
#include "twinlight/envlight/env_map.h"
#include "twinlight/panorama/panorama.h"

namespace twinlight {
namespace {

constexpr double kPi = std::numbers::pi;

RigidTransform Yawed(double yaw, double pitch = 0.0) {
  const Vec3 forward(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch));
  return LookAt(Vec3::Zero(), forward);
}

Image SkyDepth(const CameraModel& cam) {
  return Image(cam.width, cam.height, 1, std::numeric_limits<float>::infinity());
}

// Image of a dome at infinity textured by `env`.
Image ViewDome(const EnvMap& env, const CameraModel& cam) {
  Image img(cam.width, cam.height, 3);
  for (int y = 0; y < cam.height; ++y)
    for (int x = 0; x < cam.width; ++x) {
      const Vec3 v = SampleEnv(env, cam.Direction(x + 0.5, y + 0.5));
      for (int k = 0; k < 3; ++k) img.at(x, y, k) = static_cast<float>(v[k]);
    }
  return img;
}

EnvMap SmoothDome(int h) {
  EnvMap env(h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < 2 * h; ++x) {
      const Vec3 d = TexelDir(x, y, 2 * h, h);
      const double phi = std::atan2(d.y(), d.x());
      env.at(x, y, 0) = static_cast<float>(0.5 + 0.3 * d.z() + 0.15 * std::sin(3 * phi));
      env.at(x, y, 1) = static_cast<float>(0.4 + 0.2 * d.x() * d.y());
      env.at(x, y, 2) = static_cast<float>(0.6 - 0.25 * d.z() * d.z() + 0.1 * std::cos(2 * phi));
    }
  return env;
}

Panorama FromImage(const Image& img, const std::vector<char>& known) {
  Panorama p;
  p.image = img;
  p.count.resize(img.PixelCount());
  for (size_t i = 0; i < known.size(); ++i) p.count[i] = known[i] ? 1 : 0;
  return p;
}

TEST(RenderDepthTest, PerpendicularPlaneDistance) {
  const TriangleMesh plane = MakeGridPlane(-10, -10, 10, 10, 0, 2, 2);
  const Bvh bvh = Bvh::Build(plane);
  const CameraModel cam = MakeCamera(65, 65, 1.0, LookAt({0, 0, 5}, {0, 0, 0}, Vec3::UnitY()));
  const DepthMap d = RenderDepth(plane, bvh, cam);
  EXPECT_NEAR(d.at(32, 32, 0), 5.0f, 1e-5);
  const TriangleMesh empty;
  const DepthMap sky = RenderDepth(empty, Bvh::Build(empty), cam);
  for (float v : sky.data) EXPECT_TRUE(std::isinf(v));
}

TEST(RenderDepthTest, SphereMatchesAnalyticDistance) {
  const TriangleMesh sphere = MakeUvSphere(Vec3::Zero(), 1.0, 128, 64);
  const Bvh bvh = Bvh::Build(sphere);
  const CameraModel cam = MakeCamera(48, 48, 0.8, LookAt({0, -4, 0.5}, {0, 0, 0}));
  const DepthMap d = RenderDepth(sphere, bvh, cam);
  const double chord = 1.0 - std::cos(kPi / 64);
  int hits = 0;
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x) {
      const Ray r = cam.PixelRay(x, y);
      const double b = r.origin.dot(r.direction);
      const double disc = b * b - (r.origin.squaredNorm() - 1.0);
      if (disc < 0.05) continue;  // skip grazing rays near the silhouette
      ++hits;
      EXPECT_NEAR(d.at(x, y, 0), -b - std::sqrt(disc), 2 * chord + 1e-5);
    }
  EXPECT_GT(hits, 200);
}

TEST(RenderDepthTest, DiskRoundTripKeepsSky) {
  const auto dir = testing::ScratchDir();
  DepthMap d(3, 2, 1, 2.5f);
  d.at(1, 1, 0) = std::numeric_limits<float>::infinity();
  WriteDepthMap((dir / "d.fb").string(), d);
  EXPECT_EQ(ReadDepthMap((dir / "d.fb").string()), d);
  d.at(0, 0, 0) = -3.0f;
  EXPECT_THROW(WriteDepthMap((dir / "e.fb").string(), d), PreconditionError);
}

TEST(StitchTest, ForwardAxisTexelTakesCentrePixel) {
  const CameraModel cam = MakeCamera(9, 9, kPi / 2, Yawed(0.7, 0.2));
  Image img(9, 9, 3);
  for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<float>(i % 251) / 251.0f;
  const Panorama pano = Stitch({img}, {SkyDepth(cam)}, {cam}, 256);
  const PixelCoord p = DirToPixel(cam.pose.rotation.col(2), 512, 256);
  const int tx = static_cast<int>(p.u), ty = static_cast<int>(p.v);
  ASSERT_TRUE(pano.Observed(tx, ty));
  EXPECT_EQ(pano.count[ty * 512 + tx], 1u);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(pano.image.at(tx, ty, k), img.at(4, 4, k), 1e-9);
}

TEST(StitchTest, DuplicateCameraAndPermutationInvariance) {
  const EnvMap env = SmoothDome(32);
  std::vector<CameraModel> cams;
  std::vector<Image> imgs, depths;
  for (int i = 0; i < 3; ++i) {
    CameraModel c = MakeCamera(40, 30, 1.4, Yawed(2.1 * i, 0.1 * i));
    c.pose.translation = Vec3(0.1 * i, -0.05 * i, 0.0);
    cams.push_back(c);
    imgs.push_back(ViewDome(env, c));
    Image d(40, 30, 1, 7.0f);
    for (int x = 0; x < 40; ++x) d.at(x, 0, 0) = std::numeric_limits<float>::infinity();
    depths.push_back(d);
  }
  const Panorama one = Stitch({imgs[0]}, {depths[0]}, {cams[0]}, 64);
  const Panorama two = Stitch({imgs[0], imgs[0]}, {depths[0], depths[0]}, {cams[0], cams[0]}, 64);
  EXPECT_EQ(one.image, two.image);
  const Vec3 origin(0.02, 0.01, 0.0);
  const Panorama abc = Stitch(imgs, depths, cams, 64, origin);
  const Panorama cab = Stitch({imgs[2], imgs[0], imgs[1]}, {depths[2], depths[0], depths[1]},
                              {cams[2], cams[0], cams[1]}, 64, origin);
  EXPECT_EQ(abc.image, cab.image);
  EXPECT_EQ(abc.count, cab.count);
  for (int threads : {1, 3}) {
    testing::ScopedThreads scoped(threads);
    EXPECT_EQ(Stitch(imgs, depths, cams, 64, origin).image, abc.image);
  }
  for (size_t t = 0; t < abc.count.size(); ++t) {
    if (abc.count[t] == 0) {
      EXPECT_EQ(abc.image.data[3 * t], 0.0f);
    }
  }
}

TEST(StitchTest, DomeResamplingPsnr) {
  const int h = 128;
  const EnvMap env = SmoothDome(h);
  std::vector<CameraModel> cams;
  std::vector<Image> imgs, depths;
  for (int i = 0; i < 6; ++i) {
    cams.push_back(MakeCamera(256, 256, kPi / 2, Yawed(i * kPi / 3)));
    imgs.push_back(ViewDome(env, cams.back()));
    depths.push_back(SkyDepth(cams.back()));
  }
  const Panorama pano = Stitch(imgs, depths, cams, h);
  double se = 0.0;
  int n = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < 2 * h; ++x) {
      if (!pano.Observed(x, y)) continue;
      for (int k = 0; k < 3; ++k) {
        const double e = pano.image.at(x, y, k) - env.at(x, y, k);
        se += e * e;
      }
      ++n;
    }
  ASSERT_GT(n, h * h / 2);
  const double psnr = 10 * std::log10(1.0 / (se / (3.0 * n)));
  EXPECT_GT(psnr, 30.0) << psnr;
}

TEST(StitchTest, Preconditions) {
  const CameraModel cam = MakeCamera(4, 4, 1.0, Yawed(0));
  const Image img(4, 4, 3, 0.5f);
  EXPECT_THROW(Stitch({img, img}, {SkyDepth(cam)}, {cam}, 8), PreconditionError);
  EXPECT_THROW(Stitch({img}, {Image(3, 4, 1)}, {cam}, 8), PreconditionError);
  EXPECT_THROW(Stitch({Image(4, 4, 3, 1.5f)}, {SkyDepth(cam)}, {cam}, 8), PreconditionError);
}

TEST(FillHolesTest, FullyObservedUnchangedAndEmptyRejected) {
  Image img(16, 8, 3);
  CounterRng rng(2, kDomainTest, 0);
  for (float& v : img.data) v = static_cast<float>(rng.Uniform());
  EXPECT_EQ(FillHoles(FromImage(img, std::vector<char>(128, 1))), img);
  EXPECT_THROW(FillHoles(FromImage(img, std::vector<char>(128, 0))), PreconditionError);
}

TEST(FillHolesTest, ConstantBorderFillsConstant) {
  Image img(64, 32, 3, 0.375f);
  std::vector<char> known(64 * 32, 1);
  for (int y = 8; y < 24; ++y)
    for (int x = 20; x < 50; ++x) {
      known[y * 64 + x] = 0;
      for (int k = 0; k < 3; ++k) img.at(x, y, k) = 0.9f;
    }
  const Image out = FillHoles(FromImage(img, known));
  for (float v : out.data) EXPECT_NEAR(v, 0.375f, 1e-6);
}

TEST(FillHolesTest, LinearBandMatchesInterpolant) {
  const int w = 256, h = 128;
  Image img(w, h, 3);
  std::vector<char> known(w * h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < 3; ++k) img.at(x, y, k) = static_cast<float>(x) / w;
      if (x >= 60 && x < 180) known[y * w + x] = 0;
    }
  const Image out = FillHoles(FromImage(img, known));
  const double a = 59.0 / w, b = 180.0 / w;
  for (int y = 0; y < h; y += 9)
    for (int x = 60; x < 180; x += 7) {
      const double expect = a + (b - a) * (x - 59) / (180 - 59);
      EXPECT_NEAR(out.at(x, y, 1), expect, 0.02 * expect) << x << "," << y;
    }
}

TEST(FillHolesTest, MaximumPrinciple) {
  const int w = 128, h = 64;
  Image img(w, h, 3);
  std::vector<char> known(w * h);
  CounterRng rng(8, kDomainTest, 0);
  float lo = 1, hi = 0;
  for (int i = 0; i < w * h; ++i) {
    known[i] = rng.Uniform() < 0.1;
    for (int k = 0; k < 3; ++k) {
      const float v = static_cast<float>(0.2 + 0.5 * rng.Uniform());
      img.data[3 * i + k] = known[i] ? v : (k == 0 ? 5.0f : -5.0f);
      if (known[i]) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  for (int iterations : {0, 3, -1}) {
    FillOptions opt;
    opt.iterations = iterations;
    const Image out = FillHoles(FromImage(img, known), opt);
    EXPECT_GE(*std::min_element(out.data.begin(), out.data.end()), lo);
    EXPECT_LE(*std::max_element(out.data.begin(), out.data.end()), hi);
  }
}

}  // namespace
}  // namespace twinlight
