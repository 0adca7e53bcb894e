#ifndef TWINLIGHT_SCENE_EDITS_H_
#define TWINLIGHT_SCENE_EDITS_H_

#include <string>
#include <vector>

#include "twinlight/scene/scene.h"

namespace twinlight {

struct Edit {
  enum class Kind { kRemove, kInsert, kRetime, kSetEnv, kRotateEnv, kMoveRig };

  Kind kind = Kind::kRemove;
  std::string id;                    // remove, insert, retime
  TriangleMesh mesh;                 // insert
  Trajectory trajectory;             // insert, retime
  EnvMap env;                        // set_env
  double yaw = 0.0;                  // rotate_env, radians about +z
  std::vector<CameraModel> cameras;  // move_rig

  static Edit Remove(const std::string& id);
  static Edit Insert(const Actor& actor);
  static Edit Retime(const std::string& id, const Trajectory& trajectory);
  static Edit SetEnv(const EnvMap& env);
  static Edit RotateEnv(double yaw);
  static Edit MoveRig(const std::vector<CameraModel>& cameras);
};

using EditScript = std::vector<Edit>;

const char* EditKindName(Edit::Kind kind);

// Applies the edits in order to a copy of `scene`. A PreconditionError names
// the edit index, its kind and the offending actor id.
Scene ApplyEdits(const Scene& scene, const EditScript& script);

}  // namespace twinlight

#endif  // TWINLIGHT_SCENE_EDITS_H_
