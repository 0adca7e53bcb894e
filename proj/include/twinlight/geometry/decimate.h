#ifndef TWINLIGHT_GEOMETRY_DECIMATE_H_
#define TWINLIGHT_GEOMETRY_DECIMATE_H_

#include <cstddef>

#include "twinlight/geometry/mesh.h"

namespace twinlight {

struct DecimateOptions {
  // Scale of the perpendicular constraint planes added along open
  // boundaries, relative to squared edge length.
  double boundary_weight = 1000.0;
};

// Garland-Heckbert quadric edge collapse down to `target_triangles` (>= 4).
// Each collapse keeps one endpoint; the merged vertex is placed at the
// quadric minimiser when it is well conditioned (otherwise at the cheaper
// endpoint) and inherits the normal and albedo of the endpoint nearest to its
// new position. Collapses that break the link condition, pinch a boundary or
// flip any surrounding face normal are rejected, so the result may stop above
// the target. Meshes already at or below the target are returned unchanged.
TriangleMesh Decimate(const TriangleMesh& mesh, size_t target_triangles,
                      const DecimateOptions& options = {});

}  // namespace twinlight

#endif  // TWINLIGHT_GEOMETRY_DECIMATE_H_
