#ifndef TWINLIGHT_SCENE_SCENE_FILE_H_
#define TWINLIGHT_SCENE_SCENE_FILE_H_

#include <string>

#include "twinlight/common/kv_text.h"
#include "twinlight/scene/edits.h"
#include "twinlight/scene/scene.h"

namespace twinlight {

inline constexpr int kSceneGrammarVersion = 1;

// Trajectory text: one "frame tx ty tz qw qx qy qz" row per key.
Trajectory ParseTrajectory(const std::string& text, const std::string& source);
std::string FormatTrajectory(const Trajectory& trajectory);
Trajectory ReadTrajectory(const std::string& path);
void WriteTrajectory(const std::string& path, const Trajectory& trajectory);

// Scene description (grammar in docs/scene_format.md). Relative paths
// resolve against the directory of `source`. A [settings] section is
// accepted and ignored here.
Scene ParseScene(const KvDocument& doc);
Scene ReadScene(const std::string& path);

// Dome from a file holding a single [lighting] section.
EnvMap ReadLightingFile(const std::string& path);

// Edit script in the same text format. [rig] edits take intrinsics and the
// frame count from `base`.
EditScript ParseEditScript(const KvDocument& doc, const Scene& base);
EditScript ReadEditScript(const std::string& path, const Scene& base);

}  // namespace twinlight

#endif  // TWINLIGHT_SCENE_SCENE_FILE_H_
