#include "twinlight/scene/scene.h"

#include <Eigen/Geometry>
#include <set>

#include "twinlight/common/image.h"

namespace twinlight {

const CameraModel& Scene::CameraAt(int frame) const {
  Require(!cameras.empty(), "scene has no camera");
  Require(frame >= 0 && frame < frame_count,
          "frame " + std::to_string(frame) + " outside [0, " + std::to_string(frame_count) + ")");
  return cameras.size() == 1 ? cameras.front() : cameras.at(frame);
}

const Actor* Scene::FindActor(const std::string& id) const {
  for (const Actor& a : actors)
    if (a.id == id) return &a;
  return nullptr;
}

void ValidateScene(const Scene& scene) {
  Require(scene.frame_count >= 1, "scene needs at least one frame");
  Require(!scene.cameras.empty(), "scene needs at least one camera");
  Require(scene.cameras.size() == 1 || static_cast<int>(scene.cameras.size()) == scene.frame_count,
          "scene needs one camera or one per frame");
  for (const CameraModel& c : scene.cameras) ValidateCamera(c);
  ValidateMesh(scene.background);
  ValidateEnvMap(scene.env);
  std::set<std::string> ids;
  for (const Actor& a : scene.actors) {
    const std::string tag = "actor '" + a.id + "'";
    Require(!a.id.empty(), "actor id must be non-empty");
    Require(ids.insert(a.id).second, "duplicate " + tag);
    Require(!a.trajectory.empty(), tag + " has an empty trajectory");
    for (const auto& [frame, pose] : a.trajectory) {
      Require(frame >= 0 && frame < scene.frame_count,
              tag + " has a key at frame " + std::to_string(frame) + " outside the scene");
      ValidateRigidTransform(pose);
    }
    ValidateMesh(a.mesh);
  }
}

RigidTransform PoseAt(const Trajectory& trajectory, int frame) {
  Require(!trajectory.empty(), "empty trajectory");
  const auto hi = trajectory.lower_bound(frame);
  if (hi != trajectory.end() && hi->first == frame) return hi->second;
  if (hi == trajectory.begin()) return hi->second;
  const auto lo = std::prev(hi);
  if (hi == trajectory.end()) return lo->second;
  const double s = static_cast<double>(frame - lo->first) / (hi->first - lo->first);
  const Eigen::Quaterniond q = lo->second.Quaternion().slerp(s, hi->second.Quaternion());
  RigidTransform out;
  out.rotation = q.normalized().toRotationMatrix();
  out.translation = (1.0 - s) * lo->second.translation + s * hi->second.translation;
  return out;
}

TriangleMesh TransformMesh(const TriangleMesh& mesh, const RigidTransform& pose) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = pose.Apply(v);
  for (Vec3& n : out.normals) n = pose.ApplyDirection(n);
  return out;
}

FrameGeometry BuildFrameGeometry(const Scene& scene, int frame) {
  Require(frame >= 0 && frame < scene.frame_count,
          "frame " + std::to_string(frame) + " outside [0, " + std::to_string(scene.frame_count) + ")");
  FrameGeometry g;
  g.mesh = scene.background;
  g.tag.assign(scene.background.TriangleCount(), kBackgroundTag);
  for (size_t i = 0; i < scene.actors.size(); ++i) {
    const Actor& a = scene.actors[i];
    g.mesh.Append(TransformMesh(a.mesh, PoseAt(a.trajectory, frame)));
    g.tag.insert(g.tag.end(), a.mesh.TriangleCount(), static_cast<int>(i));
  }
  return g;
}

std::vector<CameraModel> RigCameras(const CameraModel& intrinsics, const Trajectory& rig,
                                    int frame_count) {
  Require(frame_count >= 1, "rig needs at least one frame");
  std::vector<CameraModel> cams;
  for (int f = 0; f < frame_count; ++f) {
    CameraModel c = intrinsics;
    c.pose = PoseAt(rig, f);
    cams.push_back(c);
  }
  return cams;
}

}  // namespace twinlight
