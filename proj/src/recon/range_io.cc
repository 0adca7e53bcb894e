#include "twinlight/recon/range_io.h"

#include <cmath>

#include "twinlight/common/image.h"
#include "twinlight/common/kv_text.h"

namespace twinlight {
namespace {

void AppendNumber(std::string& out, double v) { out += FormatDouble(v); }

void AppendRow(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out.push_back(' ');
    first = false;
    AppendNumber(out, v);
  }
}

Vec3 ParseVec(const std::string& source, const TableRow& row, size_t first) {
  return {TokenDouble(source, row, first), TokenDouble(source, row, first + 1),
          TokenDouble(source, row, first + 2)};
}

}  // namespace

std::vector<RangeSample> ParseRangeSamples(const std::string& text, const std::string& source) {
  std::vector<RangeSample> out;
  for (const TableRow& row : TokenizeTable(text)) {
    ExpectTokenCount(source, row, 7);
    RangeSample s;
    s.ray.origin = ParseVec(source, row, 0);
    const Vec3 d = ParseVec(source, row, 3);
    if (!(d.norm() > 0.0)) throw ParseError(source, row.line, row.tokens[3].column, "zero ray direction");
    s.ray.direction = d.normalized();
    if (row.tokens[6].text != "sky") {
      s.depth = TokenDouble(source, row, 6);
      if (!(s.depth > 0.0)) {
        throw ParseError(source, row.line, row.tokens[6].column, "depth must be > 0 or 'sky'");
      }
    }
    out.push_back(s);
  }
  return out;
}

std::string FormatRangeSamples(const std::vector<RangeSample>& samples) {
  std::string out;
  for (const RangeSample& s : samples) {
    const Vec3& o = s.ray.origin;
    const Vec3& d = s.ray.direction;
    AppendRow(out, {o.x(), o.y(), o.z(), d.x(), d.y(), d.z()});
    out.push_back(' ');
    if (s.IsSky()) {
      out += "sky";
    } else {
      AppendNumber(out, s.depth);
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<RangeSample> ReadRangeSamples(const std::string& path) {
  return ParseRangeSamples(ReadTextFile(path), path);
}

void WriteRangeSamples(const std::string& path, const std::vector<RangeSample>& samples) {
  WriteTextFile(path, FormatRangeSamples(samples));
}

std::string FormatLossTrace(const std::vector<LossTerms>& trace) {
  std::string out = "iter,loss_lidar,loss_eik,loss_free\n";
  for (size_t i = 0; i < trace.size(); ++i) {
    out += std::to_string(i);
    for (double v : {trace[i].lidar, trace[i].eikonal, trace[i].freespace}) {
      out.push_back(',');
      AppendNumber(out, v);
    }
    out.push_back('\n');
  }
  return out;
}

void WriteLossTrace(const std::string& path, const std::vector<LossTerms>& trace) {
  WriteTextFile(path, FormatLossTrace(trace));
}

std::vector<CameraModel> ParseCameraList(const std::string& text, const std::string& source) {
  std::vector<CameraModel> out;
  for (const TableRow& row : TokenizeTable(text)) {
    ExpectTokenCount(source, row, 13);
    CameraModel cam;
    const long w = TokenInt(source, row, 0);
    const long h = TokenInt(source, row, 1);
    if (w <= 0 || h <= 0 || w > 65535 || h > 65535) {
      throw ParseError(source, row.line, row.tokens[0].column, "camera size out of range");
    }
    cam.width = static_cast<int>(w);
    cam.height = static_cast<int>(h);
    cam.fx = TokenDouble(source, row, 2);
    cam.fy = TokenDouble(source, row, 3);
    cam.cx = TokenDouble(source, row, 4);
    cam.cy = TokenDouble(source, row, 5);
    const Vec3 t = ParseVec(source, row, 6);
    const double qw = TokenDouble(source, row, 9), qx = TokenDouble(source, row, 10),
                 qy = TokenDouble(source, row, 11), qz = TokenDouble(source, row, 12);
    if (!(std::sqrt(qw * qw + qx * qx + qy * qy + qz * qz) > 1e-12)) {
      throw ParseError(source, row.line, row.tokens[9].column, "zero quaternion");
    }
    cam.pose = RigidTransform::FromQuaternion(qw, qx, qy, qz, t);
    try {
      ValidateCamera(cam);
    } catch (const PreconditionError& e) {
      throw ParseError(source, row.line, 1, e.what());
    }
    out.push_back(cam);
  }
  return out;
}

std::string FormatCameraList(const std::vector<CameraModel>& cameras) {
  std::string out;
  for (const CameraModel& c : cameras) {
    out += std::to_string(c.width) + " " + std::to_string(c.height) + " ";
    const Vec3& t = c.pose.translation;
    const Eigen::Quaterniond q = c.pose.Quaternion();
    AppendRow(out, {c.fx, c.fy, c.cx, c.cy, t.x(), t.y(), t.z(), q.w(), q.x(), q.y(), q.z()});
    out.push_back('\n');
  }
  return out;
}

std::vector<CameraModel> ReadCameraList(const std::string& path) {
  return ParseCameraList(ReadTextFile(path), path);
}

void WriteCameraList(const std::string& path, const std::vector<CameraModel>& cameras) {
  WriteTextFile(path, FormatCameraList(cameras));
}

}  // namespace twinlight
