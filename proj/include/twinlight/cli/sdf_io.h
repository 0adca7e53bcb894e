#ifndef TWINLIGHT_CLI_SDF_IO_H_
#define TWINLIGHT_CLI_SDF_IO_H_

#include <string>
#include <vector>

#include "twinlight/geometry/sdf_grid.h"

namespace twinlight {

// "SDF1" container, little-endian: magic, nx ny nz (uint32), bounds lo and hi
// (6 x float64), then nx*ny*nz float64 node values in SdfGrid index order.
std::vector<unsigned char> EncodeSdf(const SdfGrid& grid);
SdfGrid DecodeSdf(const std::vector<unsigned char>& bytes, const std::string& source);
void WriteSdf(const std::string& path, const SdfGrid& grid);
SdfGrid ReadSdf(const std::string& path);

}  // namespace twinlight

#endif  // TWINLIGHT_CLI_SDF_IO_H_
