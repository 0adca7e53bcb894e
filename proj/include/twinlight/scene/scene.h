#ifndef TWINLIGHT_SCENE_SCENE_H_
#define TWINLIGHT_SCENE_SCENE_H_

#include <map>
#include <string>
#include <vector>

#include "twinlight/envlight/env_map.h"
#include "twinlight/geometry/mesh.h"
#include "twinlight/recon/camera.h"

namespace twinlight {

// Object-to-world pose keyed by frame index.
using Trajectory = std::map<int, RigidTransform>;

struct Actor {
  std::string id;
  TriangleMesh mesh;  // object frame
  Trajectory trajectory;
};

struct Scene {
  TriangleMesh background;
  std::vector<Actor> actors;
  // One camera per frame, or a single camera for every frame.
  std::vector<CameraModel> cameras;
  EnvMap env;
  int frame_count = 1;

  const CameraModel& CameraAt(int frame) const;
  const Actor* FindActor(const std::string& id) const;
};

// Throws PreconditionError: unique non-empty actor ids, non-empty
// trajectories keyed inside [0, frame_count), valid poses, meshes, cameras
// and dome.
void ValidateScene(const Scene& scene);

// Exact key when present; the nearest key outside the key range; otherwise
// linear translation and spherical rotation between the bracketing keys.
RigidTransform PoseAt(const Trajectory& trajectory, int frame);

inline constexpr int kBackgroundTag = -1;

struct FrameGeometry {
  TriangleMesh mesh;
  std::vector<int> tag;  // per triangle: kBackgroundTag or the actor index
};

// Background followed by every actor placed at its frame pose. Every actor
// is present in every frame.
FrameGeometry BuildFrameGeometry(const Scene& scene, int frame);

// Mesh with vertices and normals mapped through `pose`.
TriangleMesh TransformMesh(const TriangleMesh& mesh, const RigidTransform& pose);

// One camera per frame: `intrinsics` with poses from the rig trajectory.
std::vector<CameraModel> RigCameras(const CameraModel& intrinsics, const Trajectory& rig,
                                    int frame_count);

}  // namespace twinlight

#endif  // TWINLIGHT_SCENE_SCENE_H_
