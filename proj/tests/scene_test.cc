#include <cmath>
#include <filesystem>
#include <numbers>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "shadow_oracle.h"
#include "test_util.h"
#include "twinlight/common/float_buffer.h"
#include "twinlight/common/kv_text.h"
#include "twinlight/envlight/rgbe_io.h"
#include "twinlight/envlight/sky.h"
#include "twinlight/geometry/ply_io.h"
#include "twinlight/scene/edits.h"
#include "twinlight/scene/scene_file.h"
#include "twinlight/scene/simulate.h"

namespace twinlight {
namespace {

constexpr double kPi = std::numbers::pi;

RigidTransform Translate(double x, double y, double z) {
  RigidTransform t;
  t.translation = Vec3(x, y, z);
  return t;
}

Vec3 Centroid(const TriangleMesh& m, size_t first_vertex) {
  Vec3 c = Vec3::Zero();
  for (size_t i = first_vertex; i < m.vertices.size(); ++i) c += m.vertices[i];
  return c / static_cast<double>(m.vertices.size() - first_vertex);
}

EnvMap SunSky(const Vec3& toward_sun, int height = 64) {
  SkyParams p;
  p.f_int = 5000.0;
  p.f_dir = toward_sun.normalized();
  return DecodeSky(p, height);
}

Scene BaseScene(int frames = 5) {
  Scene s;
  s.background = MakeGridPlane(-4, -4, 4, 4, 0, 4, 4);
  s.frame_count = frames;
  s.cameras = {MakeCamera(96, 96, 2 * std::atan(4.0 / 10.0), LookAt({0, 0, 10}, {0, 0, 0}, Vec3::UnitY()))};
  s.env = SunSky(Vec3(1, 0.5, 1.2));
  Actor car{"car", MakeBox({-0.5, -0.5, 0}, {0.5, 0.5, 1}), {}};
  for (int f = 0; f < frames; ++f) car.trajectory[f] = Translate(-2.0 + f, 0, 0);
  s.actors.push_back(car);
  return s;
}

bool SameActors(const Scene& a, const Scene& b) {
  if (a.actors.size() != b.actors.size()) return false;
  for (size_t i = 0; i < a.actors.size(); ++i) {
    const Actor &x = a.actors[i], &y = b.actors[i];
    if (x.id != y.id || x.trajectory != y.trajectory || x.mesh.vertices != y.mesh.vertices ||
        x.mesh.triangles != y.mesh.triangles)
      return false;
  }
  return true;
}

TEST(PoseTest, InterpolatesBetweenKeysAndClampsOutside) {
  Trajectory t;
  t[0] = Translate(0, 0, 0);
  RigidTransform end = Translate(2, 0, 0);
  end.rotation = Eigen::AngleAxisd(kPi / 2, Vec3::UnitZ()).toRotationMatrix();
  t[4] = end;
  t[6] = Translate(5, 5, 5);
  const RigidTransform mid = PoseAt(t, 2);
  EXPECT_TRUE(mid.translation.isApprox(Vec3(1, 0, 0), 1e-12));
  EXPECT_TRUE(mid.rotation.isApprox(Eigen::AngleAxisd(kPi / 4, Vec3::UnitZ()).toRotationMatrix(), 1e-12));
  EXPECT_EQ(PoseAt(t, 4), end);
  EXPECT_EQ(PoseAt(t, 9), t[6]);
  Trajectory late;
  late[3] = end;
  EXPECT_EQ(PoseAt(late, 0), end);
}

TEST(FrameGeometryTest, BackgroundAloneAndIdentityPose) {
  Scene s = BaseScene();
  s.actors.clear();
  const FrameGeometry bg = BuildFrameGeometry(s, 0);
  EXPECT_EQ(bg.mesh.vertices, s.background.vertices);
  EXPECT_EQ(bg.tag, std::vector<int>(s.background.TriangleCount(), kBackgroundTag));

  const TriangleMesh box = MakeBox({1, 2, 3}, {2, 3, 4});
  s.actors.push_back({"a", box, {{0, RigidTransform{}}}});
  const FrameGeometry g = BuildFrameGeometry(s, 3);
  ASSERT_EQ(g.mesh.TriangleCount(), s.background.TriangleCount() + box.TriangleCount());
  ASSERT_EQ(g.tag.size(), g.mesh.TriangleCount());
  EXPECT_EQ(g.tag.back(), 0);
  for (size_t i = 0; i < box.VertexCount(); ++i)
    EXPECT_EQ(g.mesh.vertices[s.background.VertexCount() + i], box.vertices[i]);
}

TEST(FrameGeometryTest, MidpointTranslation) {
  Scene s = BaseScene(3);
  s.actors[0].trajectory = {{0, Translate(0, 0, 0)}, {2, Translate(2, 0, 0)}};
  const Vec3 c0 = Centroid(BuildFrameGeometry(s, 0).mesh, s.background.VertexCount());
  const Vec3 c1 = Centroid(BuildFrameGeometry(s, 1).mesh, s.background.VertexCount());
  EXPECT_TRUE((c1 - c0).isApprox(Vec3(1, 0, 0), 1e-12));
  EXPECT_THROW(BuildFrameGeometry(s, 3), PreconditionError);
}

TEST(EditTest, EmptyScriptAndInverseInsertRemove) {
  const Scene s = BaseScene();
  EXPECT_TRUE(SameActors(ApplyEdits(s, {}), s));
  Actor cone{"cone", MakeBox({0, 0, 0}, {0.2, 0.2, 0.5}), {{1, Translate(1, 1, 0)}}};
  const Scene inserted = ApplyEdits(s, {Edit::Insert(cone)});
  EXPECT_EQ(inserted.actors.size(), 2u);
  EXPECT_EQ(s.actors.size(), 1u);
  EXPECT_TRUE(SameActors(ApplyEdits(s, {Edit::Insert(cone), Edit::Remove("cone")}), s));
}

TEST(EditTest, RetimeShiftsPlacement) {
  Scene s = BaseScene(6);
  s.actors[0].trajectory.erase(5);
  Trajectory shifted;
  for (const auto& [f, pose] : s.actors[0].trajectory) shifted[f + 1] = pose;
  const Scene late = ApplyEdits(s, {Edit::Retime("car", shifted)});
  for (int t = 1; t < 6; ++t)
    EXPECT_EQ(BuildFrameGeometry(late, t).mesh.vertices, BuildFrameGeometry(s, t - 1).mesh.vertices);
}

TEST(EditTest, UnknownIdNamesIdAndIndex) {
  const Scene s = BaseScene();
  try {
    ApplyEdits(s, {Edit::RotateEnv(1.0), Edit::Remove("ghost")});
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("edit 1"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos) << e.what();
  }
  Actor dup = s.actors[0];
  EXPECT_THROW(ApplyEdits(s, {Edit::Insert(dup)}), PreconditionError);
  Actor outside{"far", MakeBox({0, 0, 0}, {1, 1, 1}), {{9, RigidTransform{}}}};
  EXPECT_THROW(ApplyEdits(s, {Edit::Insert(outside)}), PreconditionError);
}

TEST(EditTest, PureAndEnvEdits) {
  const Scene s = BaseScene();
  const EditScript script = {Edit::RotateEnv(kPi), Edit::Remove("car"), Edit::SetEnv(EnvMap(8, 1.0f))};
  const Scene a = ApplyEdits(s, script), b = ApplyEdits(s, script);
  EXPECT_TRUE(SameActors(a, b));
  EXPECT_EQ(a.env, EnvMap(8, 1.0f));
  EXPECT_EQ(ApplyEdits(s, {Edit::RotateEnv(kPi)}).env, RotateEnv(s.env, kPi));
  const CameraModel moved = MakeCamera(8, 8, 1.0, LookAt({1, 2, 3}, {0, 0, 0}));
  EXPECT_EQ(ApplyEdits(s, {Edit::MoveRig({moved})}).CameraAt(4), moved);
}

class SceneFileTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::ScratchDir();
    WritePly(Path("ground.ply"), MakeGridPlane(-4, -4, 4, 4, 0, 2, 2));
    WritePly(Path("car.ply"), MakeBox({-0.5, -0.5, 0}, {0.5, 0.5, 1}));
    Trajectory t;
    for (int f = 0; f < 3; ++f) t[f] = Translate(f, 0, 0);
    WriteTrajectory(Path("car.traj"), t);
  }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }
  std::string Write(const std::string& name, const std::string& text) const {
    WriteTextFile(Path(name), text);
    return Path(name);
  }

  std::filesystem::path dir_;
};

constexpr const char* kSceneText = R"(# test scene
[scene]
version = 1

[background]
ply = ground.ply

[actor "car"]
ply = car.ply
trajectory = car.traj

[camera]
width = 32
height = 24
hfov = 60
eye = 0 -8 4
target = 0 0 0

[lighting]
sky = 0.1 0 0 0 0 0 0 0
sun_intensity = 800
sun_azimuth = 135
sun_elevation = 45
height = 32

[settings]
spp = 8
)";

TEST_F(SceneFileTest, ParsesFullScene) {
  const Scene s = ReadScene(Write("scene.txt", kSceneText));
  EXPECT_EQ(s.frame_count, 3);
  ASSERT_EQ(s.actors.size(), 1u);
  EXPECT_EQ(s.actors[0].id, "car");
  EXPECT_EQ(s.actors[0].trajectory.size(), 3u);
  EXPECT_EQ(s.cameras.size(), 1u);
  EXPECT_EQ(s.CameraAt(2).width, 32);
  EXPECT_NEAR(s.cameras[0].Center().y(), -8.0, 1e-12);
  EXPECT_EQ(s.env.height(), 32);
  EXPECT_NO_THROW(ValidateScene(s));
}

TEST_F(SceneFileTest, HdrLightingAndPoseFile) {
  WriteEnvMap(Path("sky.hdr"), EnvMap(16, 0.5f));
  WriteTrajectory(Path("rig.traj"), {{0, LookAt({0, -8, 4}, {0, 0, 0})}, {3, LookAt({2, -8, 4}, {0, 0, 0})}});
  std::string text = kSceneText;
  text.replace(text.find("eye = 0 -8 4\ntarget = 0 0 0"), 28, "poses = rig.traj");
  text.replace(text.find("sky = "), text.find("[settings]") - text.find("sky = "), "hdr = sky.hdr\n\n");
  const Scene s = ReadScene(Write("scene.txt", text));
  EXPECT_EQ(s.frame_count, 4);
  ASSERT_EQ(s.cameras.size(), 4u);
  EXPECT_NEAR(s.cameras[1].Center().x(), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(s.env.height(), 16);
}

void ExpectParseError(const std::string& path, int line, int column) {
  try {
    ReadScene(path);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    if (column > 0) {
      EXPECT_EQ(e.column(), column) << e.what();
    }
  }
}

TEST_F(SceneFileTest, ErrorsCarryLineAndColumn) {
  std::string bad = kSceneText;
  bad.replace(bad.find("width = 32"), 10, "width = 3x");
  ExpectParseError(Write("a.txt", bad), 13, 9);
  bad = kSceneText;
  bad.replace(bad.find("[lighting]"), 10, "[lights]");
  ExpectParseError(Write("b.txt", bad), 19, 1);
  bad = kSceneText;
  bad.replace(bad.find("hfov = 60"), 9, "hfov = 60\nzoom = 2");
  ExpectParseError(Write("c.txt", bad), 16, 0);
  Write("car.traj", "0 0 0 0 1 0 0 0\n1 0 0 0 0 0 0 0\n");
  ExpectParseError(Write("d.txt", kSceneText), 2, 9);
  Write("car.traj", "0 0 0 0 1 0 0 0\n");
  bad = kSceneText;
  bad.replace(bad.find("ply = ground.ply"), 16, "ply = missing.ply");
  EXPECT_THROW(ReadScene(Write("e.txt", bad)), IoError);
}

TEST_F(SceneFileTest, TrajectoryRoundTripAndErrors) {
  Trajectory t;
  t[0] = Translate(0.1, 0.2, 0.3);
  t[7] = LookAt({1, 2, 3}, {0, 0, 0});
  const Trajectory back = ParseTrajectory(FormatTrajectory(t), "mem");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.at(0), t[0]);
  EXPECT_TRUE(back.at(7).rotation.isApprox(t[7].rotation, 1e-14));
  try {
    ParseTrajectory("0 0 0 0 1 0 0 0\n0 1 0 0 1 0 0 0\n", "mem");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 1);
  }
  EXPECT_THROW(ParseTrajectory("0 0 0 0 1 0 0\n", "mem"), ParseError);
}

TEST_F(SceneFileTest, EditScript) {
  const Scene s = ReadScene(Write("scene.txt", kSceneText));
  WritePly(Path("cone.ply"), MakeBox({0, 0, 0}, {0.3, 0.3, 0.6}));
  WriteTrajectory(Path("cone.traj"), {{1, Translate(1, 1, 0)}});
  const std::string path = Write("edits.txt", R"([insert "cone"]
ply = cone.ply
trajectory = cone.traj

[remove "car"]

[env]
rotate = 180

[rig]
eye = 1 -8 4
target = 0 0 0
)");
  const EditScript script = ReadEditScript(path, s);
  ASSERT_EQ(script.size(), 4u);
  EXPECT_EQ(script[2].kind, Edit::Kind::kRotateEnv);
  EXPECT_NEAR(script[2].yaw, kPi, 1e-15);
  const Scene edited = ApplyEdits(s, script);
  ASSERT_EQ(edited.actors.size(), 1u);
  EXPECT_EQ(edited.actors[0].id, "cone");
  EXPECT_NEAR(edited.CameraAt(0).Center().x(), 1.0, 1e-12);
  Write("bad.txt", "[paint \"car\"]\n");
  EXPECT_THROW(ReadEditScript(Path("bad.txt"), s), ParseError);
}

TEST(SimulateTest, IdentityPlaybackIsExact) {
  Scene s = BaseScene(1);
  s.actors[0].trajectory = {{0, Translate(0, 0, 0)}};
  SimulateOptions opt;
  opt.sampler = {16, 1};
  const SimulationReport r = Simulate(s, opt);
  ASSERT_TRUE(r.failures.empty());
  ASSERT_EQ(r.frames.size(), 1u);
  EXPECT_EQ(r.frames[0].relit, r.frames[0].bundle.input.source);
}

TEST(SimulateTest, FrameOrderIndependentAndFailuresKept) {
  const Scene s = BaseScene(5);
  SimulateOptions all;
  all.sampler = {8, 2};
  all.frames = {0, 1, 2, 7};
  all.env_target = RotateEnv(s.env, 1.0);
  const SimulationReport seq = Simulate(s, all);
  ASSERT_EQ(seq.frames.size(), 3u);
  ASSERT_EQ(seq.failures.size(), 1u);
  EXPECT_EQ(seq.failures[0].frame, 7);
  EXPECT_NE(seq.failures[0].message.find("frame 7"), std::string::npos);
  SimulateOptions one = all;
  one.frames = {2};
  EXPECT_EQ(Simulate(s, one).frames[0].relit, seq.frames[2].relit);
}

TEST(SimulateTest, WritesBundlesAndPreviews) {
  const auto dir = testing::ScratchDir();
  Scene s = BaseScene(3);
  s.cameras = {MakeCamera(24, 16, 1.2, LookAt({0, -8, 4}, {0, 0, 0}))};
  SimulateOptions opt;
  opt.sampler = {4, 0};
  opt.out_dir = dir.string();
  const SimulationReport r = Simulate(s, opt);
  ASSERT_TRUE(r.failures.empty());
  for (int f = 0; f < 3; ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04d", f);
    EXPECT_TRUE(std::filesystem::exists(dir / (std::string(name) + ".png")));
    const RelightBundle b = ReadBundle((dir / name).string());
    EXPECT_EQ(b.meta.frame, f);
    EXPECT_EQ(Relight(b.input), ReadFloatBuffer((dir / name / "relit.fb").string()));
    EXPECT_EQ(Relight(b.input), b.input.source);
  }
}

TEST(SimulateTest, ShadowTracksMovingActor) {
  const Scene s = BaseScene(5);
  const Vec3 sun = Vec3(1, 0.5, 1.2).normalized();
  SimulateOptions opt;
  opt.sampler = {32, 0};
  const SimulationReport r = Simulate(s, opt);
  ASSERT_EQ(r.frames.size(), 5u);
  for (const FrameResult& f : r.frames) {
    const Vec3 t = s.actors[0].trajectory.at(f.frame).translation;
    const auto stats = testing::CompareShadow(f.bundle.input.gbuffer, f.bundle.input.source_maps, sun,
                                              t + Vec3(-0.5, -0.5, 0), t + Vec3(0.5, 0.5, 1));
    ASSERT_GT(stats.analytic, 20);
    EXPECT_LT((stats.rendered_centroid - stats.analytic_centroid).norm(), 2.0) << "frame " << f.frame;
  }
}

TEST(SimulateTest, RotatedDomeMirrorsShadow) {
  Scene s = BaseScene(1);
  s.actors[0].trajectory = {{0, RigidTransform{}}};
  SimulateOptions opt;
  opt.sampler = {32, 0};
  opt.env_target = RotateEnv(s.env, kPi);
  const FrameResult f = Simulate(s, opt).frames.at(0);
  const auto footprint = s.CameraAt(0).Project(Vec3::Zero());
  ASSERT_TRUE(footprint);
  const Eigen::Vector2d c(footprint->u, footprint->v);
  const Vec3 sun = Vec3(1, 0.5, 1.2).normalized();
  const Vec3 lo(-0.5, -0.5, 0), hi(0.5, 0.5, 1);
  const auto src = testing::CompareShadow(f.bundle.input.gbuffer, f.bundle.input.source_maps, sun, lo, hi);
  const auto tgt = testing::CompareShadow(f.bundle.input.gbuffer, f.bundle.input.target_maps,
                                          Vec3(-sun.x(), -sun.y(), sun.z()), lo, hi);
  ASSERT_GT(src.rendered, 20);
  ASSERT_GT(tgt.rendered, 20);
  EXPECT_LT((tgt.rendered_centroid - (2 * c - src.rendered_centroid)).norm(), 2.0);
  EXPECT_GT(tgt.iou, 0.9);
}

}  // namespace
}  // namespace twinlight
