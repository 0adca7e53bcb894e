#include "twinlight/scene/edits.h"

#include <algorithm>

#include "twinlight/common/image.h"

namespace twinlight {

Edit Edit::Remove(const std::string& id) {
  Edit e;
  e.kind = Kind::kRemove;
  e.id = id;
  return e;
}

Edit Edit::Insert(const Actor& actor) {
  Edit e;
  e.kind = Kind::kInsert;
  e.id = actor.id;
  e.mesh = actor.mesh;
  e.trajectory = actor.trajectory;
  return e;
}

Edit Edit::Retime(const std::string& id, const Trajectory& trajectory) {
  Edit e;
  e.kind = Kind::kRetime;
  e.id = id;
  e.trajectory = trajectory;
  return e;
}

Edit Edit::SetEnv(const EnvMap& env) {
  Edit e;
  e.kind = Kind::kSetEnv;
  e.env = env;
  return e;
}

Edit Edit::RotateEnv(double yaw) {
  Edit e;
  e.kind = Kind::kRotateEnv;
  e.yaw = yaw;
  return e;
}

Edit Edit::MoveRig(const std::vector<CameraModel>& cameras) {
  Edit e;
  e.kind = Kind::kMoveRig;
  e.cameras = cameras;
  return e;
}

const char* EditKindName(Edit::Kind kind) {
  switch (kind) {
    case Edit::Kind::kRemove: return "remove";
    case Edit::Kind::kInsert: return "insert";
    case Edit::Kind::kRetime: return "retime";
    case Edit::Kind::kSetEnv: return "set_env";
    case Edit::Kind::kRotateEnv: return "rotate_env";
    case Edit::Kind::kMoveRig: return "move_rig";
  }
  return "?";
}

Scene ApplyEdits(const Scene& scene, const EditScript& script) {
  Scene out = scene;
  for (size_t i = 0; i < script.size(); ++i) {
    const Edit& e = script[i];
    const std::string where = "edit " + std::to_string(i) + " (" + EditKindName(e.kind) + ")";
    auto find = [&]() {
      auto it = std::find_if(out.actors.begin(), out.actors.end(),
                             [&](const Actor& a) { return a.id == e.id; });
      Require(it != out.actors.end(), where + ": unknown actor '" + e.id + "'");
      return it;
    };
    switch (e.kind) {
      case Edit::Kind::kRemove:
        out.actors.erase(find());
        break;
      case Edit::Kind::kInsert:
        Require(out.FindActor(e.id) == nullptr, where + ": actor '" + e.id + "' already exists");
        out.actors.push_back({e.id, e.mesh, e.trajectory});
        break;
      case Edit::Kind::kRetime:
        find()->trajectory = e.trajectory;
        break;
      case Edit::Kind::kSetEnv:
        out.env = e.env;
        break;
      case Edit::Kind::kRotateEnv:
        out.env = RotateEnv(out.env, e.yaw);
        break;
      case Edit::Kind::kMoveRig:
        out.cameras = e.cameras;
        break;
    }
    try {
      ValidateScene(out);
    } catch (const PreconditionError& err) {
      throw PreconditionError(where + ": " + err.what());
    }
  }
  return out;
}

}  // namespace twinlight
