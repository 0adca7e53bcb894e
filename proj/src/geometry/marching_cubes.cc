#include "twinlight/geometry/marching_cubes.h"

#include <unordered_map>

#include "marching_cubes_table.h"
#include "twinlight/common/image.h"

namespace twinlight {
namespace {

constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                              {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

}  // namespace

TriangleMesh MarchingCubes(const SdfGrid& grid, double iso) {
  ValidateSdfGrid(grid);
  TriangleMesh mesh;
  bool any_in = false, any_out = false;
  for (double v : grid.values()) {
    (v <= iso ? any_in : any_out) = true;
  }
  if (!any_in || !any_out) return mesh;

  const auto& res = grid.resolution();
  std::unordered_map<uint64_t, uint32_t> edge_vertex;

  auto vertex_on_edge = [&](const int a[3], const int b[3]) -> uint32_t {
    const size_t ia = grid.Index(a[0], a[1], a[2]);
    const size_t ib = grid.Index(b[0], b[1], b[2]);
    int axis = 0;
    while (a[axis] == b[axis]) ++axis;
    const uint64_t key = static_cast<uint64_t>(std::min(ia, ib)) * 3 + axis;
    if (auto it = edge_vertex.find(key); it != edge_vertex.end()) return it->second;

    // Orient from the inside node to the outside node.
    const int* in = a;
    const int* out = b;
    double vin = grid.values()[ia];
    double vout = grid.values()[ib];
    if (vin > iso) {
      std::swap(in, out);
      std::swap(vin, vout);
    }
    const double t = (iso - vin) / (vout - vin);
    const Vec3 pin = grid.NodePosition(in[0], in[1], in[2]);
    const Vec3 pout = grid.NodePosition(out[0], out[1], out[2]);
    const Vec3 gin = grid.NodeGradient(in[0], in[1], in[2]);
    const Vec3 gout = grid.NodeGradient(out[0], out[1], out[2]);
    Vec3 n = (1.0 - t) * gin + t * gout;
    if (!(n.norm() > 1e-12)) n = pout - pin;

    const auto id = static_cast<uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back(pin + t * (pout - pin));
    mesh.normals.push_back(n.normalized());
    mesh.albedo.push_back(Vec3::Constant(0.5));
    edge_vertex.emplace(key, id);
    return id;
  };

  for (int k = 0; k + 1 < res[2]; ++k) {
    for (int j = 0; j + 1 < res[1]; ++j) {
      for (int i = 0; i + 1 < res[0]; ++i) {
        int config = 0;
        for (int c = 0; c < 8; ++c) {
          if (grid.at(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]) <= iso) {
            config |= 1 << c;
          }
        }
        if (config == 0 || config == 255) continue;
        const signed char* row = mc::kTriTable[config];
        for (int e = 0; row[e] >= 0; e += 3) {
          uint32_t ids[3];
          for (int m = 0; m < 3; ++m) {
            const int edge = row[e + m];
            const int* ca = kCorner[kEdge[edge][0]];
            const int* cb = kCorner[kEdge[edge][1]];
            const int a[3] = {i + ca[0], j + ca[1], k + ca[2]};
            const int b[3] = {i + cb[0], j + cb[1], k + cb[2]};
            ids[m] = vertex_on_edge(a, b);
          }
          // The table winds faces toward the set-bit (inside) corners;
          // reversing makes every face normal point toward +s.
          mesh.triangles.push_back({ids[0], ids[2], ids[1]});
        }
      }
    }
  }
  return mesh;
}

}  // namespace twinlight
