#include "twinlight/scene/scene_file.h"

#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <set>

#include "twinlight/envlight/rgbe_io.h"
#include "twinlight/envlight/sky.h"
#include "twinlight/envlight/solar.h"
#include "twinlight/geometry/ply_io.h"

namespace twinlight {
namespace {

namespace fs = std::filesystem;

constexpr double kDegree = std::numbers::pi / 180.0;
constexpr int kDefaultDomeHeight = 128;

// Typed access to one section; rejects keys outside `allowed`.
class SectionReader {
 public:
  SectionReader(const KvDocument& doc, const KvSection& section, std::set<std::string> allowed)
      : doc_(doc), section_(section) {
    for (const KvEntry& e : section.entries) {
      if (!allowed.count(e.key)) Fail(e, "unknown key '" + e.key + "' in [" + section.name + "]");
    }
  }

  const KvEntry* Get(const std::string& key) const { return section_.Find(key); }
  bool Has(const std::string& key) const { return Get(key) != nullptr; }

  const KvEntry& Need(const std::string& key) const {
    const KvEntry* e = Get(key);
    if (!e) {
      throw ParseError(doc_.source, section_.line, 1,
                       "[" + section_.name + "] needs '" + key + "'");
    }
    return *e;
  }
  double Double(const std::string& key) const { return ParseDouble(doc_.source, Need(key)); }
  long Int(const std::string& key) const { return ParseInt(doc_.source, Need(key)); }
  std::vector<double> List(const std::string& key, size_t lo, size_t hi) const {
    const KvEntry& e = Need(key);
    std::vector<double> v = ParseDoubleList(doc_.source, e);
    if (v.size() < lo || v.size() > hi) {
      Fail(e, "'" + key + "' needs " + (lo == hi ? std::to_string(lo) : std::to_string(lo) + " to " + std::to_string(hi)) +
                  " numbers");
    }
    return v;
  }
  Vec3 Vec(const std::string& key) const {
    const auto v = List(key, 3, 3);
    return {v[0], v[1], v[2]};
  }
  // Path relative to the document's directory.
  std::string Path(const std::string& key) const {
    const KvEntry& e = Need(key);
    if (e.value.empty()) Fail(e, "'" + key + "' needs a path");
    fs::path p(e.value);
    if (p.is_relative()) p = fs::path(doc_.source).parent_path() / p;
    return p.string();
  }
  [[noreturn]] void Fail(const KvEntry& e, const std::string& msg) const {
    throw ParseError(doc_.source, e.line, e.value_column, msg);
  }
  [[noreturn]] void FailSection(const std::string& msg) const {
    throw ParseError(doc_.source, section_.line, 1, msg);
  }
  const KvSection& section() const { return section_; }

 private:
  const KvDocument& doc_;
  const KvSection& section_;
};

RigidTransform PoseFromRow(const std::vector<double>& v, size_t first, const std::function<void(const std::string&)>& fail) {
  const double qn = std::sqrt(v[first + 3] * v[first + 3] + v[first + 4] * v[first + 4] +
                              v[first + 5] * v[first + 5] + v[first + 6] * v[first + 6]);
  if (!(qn > 1e-12)) fail("quaternion must be non-zero");
  return RigidTransform::FromQuaternion(v[first + 3], v[first + 4], v[first + 5], v[first + 6],
                                        Vec3(v[first], v[first + 1], v[first + 2]));
}

// [lighting] / [env]: hdr = path, or a sky literal.
EnvMap ReadLighting(const SectionReader& r) {
  const bool literal = r.Has("sky") || r.Has("sun_intensity") || r.Has("sun_direction") ||
                       r.Has("sun_azimuth") || r.Has("sun_elevation");
  if (r.Has("hdr")) {
    if (literal) r.FailSection("give either 'hdr' or a sky literal, not both");
    return ReadEnvMap(r.Path("hdr"));
  }
  SkyParams p;
  if (r.Has("sky")) {
    const auto z = r.List("sky", 0, 8);
    for (size_t i = 0; i < z.size(); ++i) p.z[i] = z[i];
  }
  if (r.Has("sun_intensity")) p.f_int = r.Double("sun_intensity");
  if (r.Has("sun_direction")) {
    if (r.Has("sun_azimuth") || r.Has("sun_elevation")) {
      r.FailSection("give either 'sun_direction' or sun angles, not both");
    }
    const Vec3 d = r.Vec("sun_direction");
    if (!(d.norm() > 0)) r.Fail(r.Need("sun_direction"), "sun_direction must be non-zero");
    p.f_dir = d.normalized();
  } else if (r.Has("sun_azimuth") || r.Has("sun_elevation")) {
    SolarAngles a;
    a.azimuth = r.Double("sun_azimuth");
    a.elevation = r.Double("sun_elevation");
    p.f_dir = DirectionFromAngles(a);
  }
  const int height = r.Has("height") ? static_cast<int>(r.Int("height")) : kDefaultDomeHeight;
  if (height < 1) r.Fail(r.Need("height"), "height must be >= 1");
  try {
    ValidateSkyParams(p);
  } catch (const PreconditionError& e) {
    r.FailSection(e.what());
  }
  return DecodeSky(p, height);
}

const std::set<std::string> kLightingKeys = {"hdr", "sky", "sun_intensity", "sun_direction",
                                             "sun_azimuth", "sun_elevation", "height"};
const std::set<std::string> kPoseKeys = {"poses", "pose", "eye", "target"};

// Rig trajectory from poses = file, pose = tx ty tz qw qx qy qz, or eye/target.
Trajectory ReadRig(const SectionReader& r) {
  const int given = r.Has("poses") + r.Has("pose") + (r.Has("eye") || r.Has("target"));
  if (given != 1) r.FailSection("give exactly one of 'poses', 'pose' or 'eye'/'target'");
  if (r.Has("poses")) return ReadTrajectory(r.Path("poses"));
  if (r.Has("pose")) {
    const auto v = r.List("pose", 7, 7);
    return {{0, PoseFromRow(v, 0, [&](const std::string& m) { r.Fail(r.Need("pose"), m); })}};
  }
  const Vec3 eye = r.Vec("eye"), target = r.Vec("target");
  if (!((target - eye).norm() > 0)) r.Fail(r.Need("target"), "target must differ from eye");
  return {{0, LookAt(eye, target)}};
}

CameraModel ReadIntrinsics(const SectionReader& r) {
  CameraModel c;
  c.width = static_cast<int>(r.Int("width"));
  c.height = static_cast<int>(r.Int("height"));
  if (c.width < 1 || c.height < 1) r.FailSection("camera size must be positive");
  if (r.Has("hfov")) {
    if (r.Has("fx") || r.Has("fy") || r.Has("cx") || r.Has("cy")) {
      r.FailSection("give either 'hfov' or fx/fy/cx/cy, not both");
    }
    const double hfov = r.Double("hfov");
    if (!(hfov > 0 && hfov < 180)) r.Fail(r.Need("hfov"), "hfov must lie in (0, 180) degrees");
    c = MakeCamera(c.width, c.height, hfov * kDegree, {});
  } else {
    c.fx = r.Double("fx");
    c.fy = r.Double("fy");
    c.cx = r.Double("cx");
    c.cy = r.Double("cy");
    if (!(c.fx > 0 && c.fy > 0)) r.FailSection("fx and fy must be > 0");
  }
  return c;
}

int MaxKey(const Trajectory& t) { return t.empty() ? -1 : t.rbegin()->first; }

}  // namespace

Trajectory ParseTrajectory(const std::string& text, const std::string& source) {
  Trajectory out;
  for (const TableRow& row : TokenizeTable(text)) {
    ExpectTokenCount(source, row, 8);
    const long frame = TokenInt(source, row, 0);
    if (frame < 0) throw ParseError(source, row.line, row.tokens[0].column, "frame must be >= 0");
    std::vector<double> v(7);
    for (size_t i = 0; i < 7; ++i) v[i] = TokenDouble(source, row, i + 1);
    const RigidTransform pose = PoseFromRow(v, 0, [&](const std::string& m) {
      throw ParseError(source, row.line, row.tokens[4].column, m);
    });
    if (!out.emplace(static_cast<int>(frame), pose).second) {
      throw ParseError(source, row.line, row.tokens[0].column,
                       "duplicate frame " + std::to_string(frame));
    }
  }
  if (out.empty()) throw ParseError(source, 1, 1, "trajectory has no rows");
  return out;
}

std::string FormatTrajectory(const Trajectory& trajectory) {
  std::string out = "# frame tx ty tz qw qx qy qz\n";
  for (const auto& [frame, pose] : trajectory) {
    const Eigen::Quaterniond q = pose.Quaternion();
    const Vec3& t = pose.translation;
    out += std::to_string(frame) + " " +
           FormatDoubles({t.x(), t.y(), t.z(), q.w(), q.x(), q.y(), q.z()}) + "\n";
  }
  return out;
}

Trajectory ReadTrajectory(const std::string& path) { return ParseTrajectory(ReadTextFile(path), path); }

void WriteTrajectory(const std::string& path, const Trajectory& trajectory) {
  WriteTextFile(path, FormatTrajectory(trajectory));
}

Scene ParseScene(const KvDocument& doc) {
  Scene scene;
  std::optional<int> frames;
  const KvSection* background = nullptr;
  const KvSection* camera = nullptr;
  const KvSection* lighting = nullptr;
  for (const KvSection& s : doc.sections) {
    auto once = [&](const KvSection*& slot) {
      if (slot) throw ParseError(doc.source, s.line, 1, "duplicate [" + s.name + "] section");
      slot = &s;
    };
    if (s.name.empty()) {
      if (!s.entries.empty()) {
        throw ParseError(doc.source, s.entries[0].line, 1, "key outside any section");
      }
    } else if (s.name == "scene") {
      const SectionReader r(doc, s, {"version", "frames"});
      if (r.Has("version") && r.Int("version") != kSceneGrammarVersion) {
        r.Fail(r.Need("version"), "unsupported scene grammar version");
      }
      if (r.Has("frames")) {
        const long n = r.Int("frames");
        if (n < 1) r.Fail(r.Need("frames"), "frames must be >= 1");
        frames = static_cast<int>(n);
      }
    } else if (s.name == "background") {
      once(background);
    } else if (s.name == "camera") {
      once(camera);
    } else if (s.name == "lighting") {
      once(lighting);
    } else if (s.name == "actor") {
      const SectionReader r(doc, s, {"ply", "trajectory"});
      if (s.label.empty()) r.FailSection("[actor] needs a quoted id, e.g. [actor \"car_1\"]");
      if (scene.FindActor(s.label)) r.FailSection("duplicate actor '" + s.label + "'");
      scene.actors.push_back({s.label, ReadPly(r.Path("ply")), ReadTrajectory(r.Path("trajectory"))});
    } else if (s.name != "settings") {
      throw ParseError(doc.source, s.line, 1, "unknown section [" + s.name + "]");
    }
  }
  if (!background) throw ParseError(doc.source, 1, 1, "missing [background] section");
  if (!camera) throw ParseError(doc.source, 1, 1, "missing [camera] section");
  if (!lighting) throw ParseError(doc.source, 1, 1, "missing [lighting] section");

  scene.background = ReadPly(SectionReader(doc, *background, {"ply"}).Path("ply"));
  std::set<std::string> camera_keys = kPoseKeys;
  camera_keys.insert({"width", "height", "hfov", "fx", "fy", "cx", "cy"});
  const SectionReader cr(doc, *camera, camera_keys);
  const CameraModel intrinsics = ReadIntrinsics(cr);
  const Trajectory rig = ReadRig(cr);
  scene.env = ReadLighting(SectionReader(doc, *lighting, kLightingKeys));

  int inferred = MaxKey(rig) + 1;
  for (const Actor& a : scene.actors) inferred = std::max(inferred, MaxKey(a.trajectory) + 1);
  scene.frame_count = frames.value_or(inferred);
  scene.cameras = rig.size() == 1 && rig.begin()->first == 0
                      ? RigCameras(intrinsics, rig, 1)
                      : RigCameras(intrinsics, rig, scene.frame_count);
  try {
    ValidateScene(scene);
  } catch (const PreconditionError& e) {
    throw ParseError(doc.source, 1, 1, std::string("invalid scene: ") + e.what());
  }
  return scene;
}

Scene ReadScene(const std::string& path) { return ParseScene(ParseKvFile(path)); }

EnvMap ReadLightingFile(const std::string& path) {
  const KvDocument doc = ParseKvFile(path);
  const KvSection* s = doc.First("lighting");
  if (!s) throw ParseError(path, 1, 1, "missing [lighting] section");
  for (const KvSection& other : doc.sections) {
    if (&other != s && (!other.name.empty() || !other.entries.empty())) {
      throw ParseError(path, other.line, 1, "only a [lighting] section is allowed here");
    }
  }
  return ReadLighting(SectionReader(doc, *s, kLightingKeys));
}

EditScript ParseEditScript(const KvDocument& doc, const Scene& base) {
  EditScript script;
  for (const KvSection& s : doc.sections) {
    if (s.name.empty()) {
      if (!s.entries.empty()) throw ParseError(doc.source, s.entries[0].line, 1, "key outside any section");
      continue;
    }
    auto need_label = [&](const SectionReader& r) {
      if (s.label.empty()) r.FailSection("[" + s.name + "] needs a quoted actor id");
    };
    if (s.name == "remove") {
      const SectionReader r(doc, s, {});
      need_label(r);
      script.push_back(Edit::Remove(s.label));
    } else if (s.name == "insert") {
      const SectionReader r(doc, s, {"ply", "trajectory"});
      need_label(r);
      script.push_back(Edit::Insert({s.label, ReadPly(r.Path("ply")), ReadTrajectory(r.Path("trajectory"))}));
    } else if (s.name == "retime") {
      const SectionReader r(doc, s, {"trajectory"});
      need_label(r);
      script.push_back(Edit::Retime(s.label, ReadTrajectory(r.Path("trajectory"))));
    } else if (s.name == "env") {
      std::set<std::string> keys = kLightingKeys;
      keys.insert("rotate");
      const SectionReader r(doc, s, keys);
      if (r.Has("rotate")) {
        if (s.entries.size() != 1) r.FailSection("'rotate' cannot be combined with other keys");
        script.push_back(Edit::RotateEnv(r.Double("rotate") * kDegree));
      } else {
        script.push_back(Edit::SetEnv(ReadLighting(r)));
      }
    } else if (s.name == "rig") {
      const SectionReader r(doc, s, kPoseKeys);
      Require(!base.cameras.empty(), "base scene has no camera");
      const Trajectory rig = ReadRig(r);
      script.push_back(Edit::MoveRig(RigCameras(base.cameras.front(), rig,
                                                rig.size() == 1 && rig.begin()->first == 0 ? 1 : base.frame_count)));
    } else {
      throw ParseError(doc.source, s.line, 1, "unknown edit [" + s.name + "]");
    }
  }
  return script;
}

EditScript ReadEditScript(const std::string& path, const Scene& base) {
  return ParseEditScript(ParseKvFile(path), base);
}

}  // namespace twinlight
