#include "twinlight/geometry/ply_io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "twinlight/common/float_buffer.h"
#include "twinlight/common/image.h"
#include "twinlight/common/kv_text.h"

namespace twinlight {
namespace {

constexpr const char* kVertexProps[9] = {"x", "y", "z", "nx", "ny", "nz",
                                         "red", "green", "blue"};

bool IsFloatType(const std::string& t) { return t == "float" || t == "float32"; }
bool IsUcharType(const std::string& t) { return t == "uchar" || t == "uint8"; }
bool IsIntType(const std::string& t) { return t == "int" || t == "int32"; }

std::vector<std::string> Split(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

template <typename T>
void Put(std::vector<unsigned char>& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

template <typename T>
T Get(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

unsigned char ToByte(double v) {
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

std::vector<unsigned char> EncodePly(const TriangleMesh& mesh) {
  ValidateMesh(mesh);
  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\n"
         << "element vertex " << mesh.VertexCount() << "\n";
  for (int i = 0; i < 6; ++i) header << "property float " << kVertexProps[i] << "\n";
  for (int i = 6; i < 9; ++i) header << "property uchar " << kVertexProps[i] << "\n";
  header << "element face " << mesh.TriangleCount() << "\n"
         << "property list uchar int vertex_indices\nend_header\n";
  const std::string h = header.str();
  std::vector<unsigned char> out(h.begin(), h.end());
  out.reserve(out.size() + mesh.VertexCount() * 27 + mesh.TriangleCount() * 13);
  for (size_t v = 0; v < mesh.VertexCount(); ++v) {
    for (int a = 0; a < 3; ++a) Put(out, static_cast<float>(mesh.vertices[v][a]));
    for (int a = 0; a < 3; ++a) Put(out, static_cast<float>(mesh.normals[v][a]));
    for (int a = 0; a < 3; ++a) out.push_back(ToByte(mesh.albedo[v][a]));
  }
  for (const auto& tri : mesh.triangles) {
    out.push_back(3);
    for (uint32_t i : tri) Put(out, static_cast<int32_t>(i));
  }
  return out;
}

TriangleMesh DecodePly(const std::vector<unsigned char>& bytes,
                       const std::string& source_name) {
  size_t pos = 0;
  int line_no = 0;
  auto next_line = [&](std::string& line) {
    if (pos >= bytes.size()) {
      throw ParseError(source_name, line_no + 1, 1, "unexpected end of PLY header");
    }
    const size_t start = pos;
    while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    line.assign(bytes.begin() + start, bytes.begin() + pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (pos < bytes.size()) ++pos;
    ++line_no;
  };
  auto fail = [&](const std::string& msg) -> void {
    throw ParseError(source_name, line_no, 1, msg);
  };

  std::string line;
  next_line(line);
  if (line != "ply") fail("expected 'ply' magic line");

  enum class Section { kNone, kVertex, kFace, kDone };
  Section section = Section::kNone;
  bool have_format = false;
  long vertex_count = -1, face_count = -1;
  int vertex_props = 0;
  bool face_list = false;
  while (true) {
    next_line(line);
    const auto words = Split(line);
    if (words.empty()) fail("blank header line");
    const std::string& kw = words[0];
    if (kw == "comment" || kw == "obj_info") continue;
    if (kw == "end_header") {
      if (!have_format) fail("missing format line before end_header");
      if (vertex_count < 0 || face_count < 0) fail("header must declare vertex and face elements");
      if (vertex_props != 9) fail("vertex element needs x y z nx ny nz red green blue");
      if (!face_list) fail("face element needs 'property list uchar int vertex_indices'");
      break;
    }
    if (kw == "format") {
      if (words.size() != 3 || words[1] != "binary_little_endian" || words[2] != "1.0") {
        fail("only 'format binary_little_endian 1.0' is supported");
      }
      have_format = true;
    } else if (kw == "element") {
      if (words.size() != 3) fail("malformed element line");
      long count = -1;
      try {
        size_t used = 0;
        count = std::stol(words[2], &used);
        if (used != words[2].size()) count = -1;
      } catch (const std::exception&) {
        count = -1;
      }
      if (count < 0) fail("element count must be a non-negative integer");
      if (words[1] == "vertex" && section == Section::kNone) {
        vertex_count = count;
        section = Section::kVertex;
      } else if (words[1] == "face" && section == Section::kVertex) {
        if (vertex_props != 9) fail("vertex element needs x y z nx ny nz red green blue");
        face_count = count;
        section = Section::kFace;
      } else {
        fail("unexpected element '" + words[1] + "' (expected vertex then face)");
      }
    } else if (kw == "property") {
      if (section == Section::kVertex) {
        if (words.size() != 3 || vertex_props >= 9 || words[2] != kVertexProps[vertex_props]) {
          fail("unexpected vertex property (expected '" +
               std::string(vertex_props < 9 ? kVertexProps[vertex_props] : "none") + "')");
        }
        const bool ok = vertex_props < 6 ? IsFloatType(words[1]) : IsUcharType(words[1]);
        if (!ok) fail("wrong type for vertex property '" + words[2] + "'");
        ++vertex_props;
      } else if (section == Section::kFace) {
        if (face_list || words.size() != 5 || words[1] != "list" || !IsUcharType(words[2]) ||
            !IsIntType(words[3]) ||
            (words[4] != "vertex_indices" && words[4] != "vertex_index")) {
          fail("face property must be 'property list uchar int vertex_indices'");
        }
        face_list = true;
      } else {
        fail("property outside of an element");
      }
    } else {
      fail("unknown header keyword '" + kw + "'");
    }
  }

  const size_t body = static_cast<size_t>(vertex_count) * 27 + static_cast<size_t>(face_count) * 13;
  if (bytes.size() - pos < body) {
    throw IoError(source_name + ": truncated PLY body: expected " + std::to_string(body) +
                  " bytes, got " + std::to_string(bytes.size() - pos));
  }
  TriangleMesh mesh;
  mesh.vertices.resize(vertex_count);
  mesh.normals.resize(vertex_count);
  mesh.albedo.resize(vertex_count);
  const unsigned char* p = bytes.data() + pos;
  for (long v = 0; v < vertex_count; ++v, p += 27) {
    for (int a = 0; a < 3; ++a) mesh.vertices[v][a] = Get<float>(p + 4 * a);
    Vec3 n;
    for (int a = 0; a < 3; ++a) n[a] = Get<float>(p + 12 + 4 * a);
    const double len = n.norm();
    mesh.normals[v] = len > 0.0 && std::isfinite(len) ? Vec3(n / len) : Vec3::UnitZ();
    for (int a = 0; a < 3; ++a) mesh.albedo[v][a] = p[24 + a] / 255.0;
  }
  mesh.triangles.resize(face_count);
  for (long f = 0; f < face_count; ++f, p += 13) {
    if (p[0] != 3) {
      throw IoError(source_name + ": face " + std::to_string(f) + " has " +
                    std::to_string(p[0]) + " vertices, expected 3");
    }
    for (int k = 0; k < 3; ++k) {
      const int32_t idx = Get<int32_t>(p + 1 + 4 * k);
      if (idx < 0 || idx >= vertex_count) {
        throw IoError(source_name + ": face " + std::to_string(f) + " index " +
                      std::to_string(idx) + " out of range");
      }
      mesh.triangles[f][k] = static_cast<uint32_t>(idx);
    }
  }
  try {
    ValidateMesh(mesh);
  } catch (const PreconditionError& e) {
    throw IoError(source_name + ": " + e.what());
  }
  return mesh;
}

void WritePly(const std::string& path, const TriangleMesh& mesh) {
  WriteFileBytes(path, EncodePly(mesh));
}

TriangleMesh ReadPly(const std::string& path) {
  return DecodePly(ReadFileBytes(path), path);
}

}  // namespace twinlight
