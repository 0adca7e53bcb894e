#ifndef TWINLIGHT_GEOMETRY_PLY_IO_H_
#define TWINLIGHT_GEOMETRY_PLY_IO_H_

#include <string>
#include <vector>

#include "twinlight/geometry/mesh.h"

namespace twinlight {

// Binary little-endian PLY with exactly this layout:
//   element vertex N: float x y z nx ny nz, uchar red green blue
//   element face M:   property list uchar int vertex_indices (count 3)
// Colors hold round(albedo * 255). Comment lines are allowed in the header.
std::vector<unsigned char> EncodePly(const TriangleMesh& mesh);
TriangleMesh DecodePly(const std::vector<unsigned char>& bytes,
                       const std::string& source_name = "<memory>");

// Header violations raise ParseError naming the offending header line;
// truncated bodies and bad indices raise IoError.
void WritePly(const std::string& path, const TriangleMesh& mesh);
TriangleMesh ReadPly(const std::string& path);

}  // namespace twinlight

#endif  // TWINLIGHT_GEOMETRY_PLY_IO_H_
