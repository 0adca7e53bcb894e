#ifndef TWINLIGHT_GEOMETRY_MARCHING_CUBES_H_
#define TWINLIGHT_GEOMETRY_MARCHING_CUBES_H_

#include "twinlight/geometry/mesh.h"
#include "twinlight/geometry/sdf_grid.h"

namespace twinlight {

// Extracts the s = iso level set with the fixed 256-case table (no
// asymptotic decider). Vertices are shared between neighbouring cells through
// their lattice edge, placed by linear interpolation along that edge; normals
// are the normalised interpolation of central-difference node gradients and
// triangles are wound counter-clockwise seen from outside (s > iso). Vertex
// albedo is 0.5 grey. A grid whose values lie entirely on one side of iso
// yields an empty mesh.
TriangleMesh MarchingCubes(const SdfGrid& grid, double iso = 0.0);

}  // namespace twinlight

#endif  // TWINLIGHT_GEOMETRY_MARCHING_CUBES_H_
