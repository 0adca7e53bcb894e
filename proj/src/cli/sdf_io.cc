#include "twinlight/cli/sdf_io.h"

#include <bit>
#include <cstring>

#include "twinlight/common/float_buffer.h"
#include "twinlight/common/image.h"

namespace twinlight {
namespace {

static_assert(std::endian::native == std::endian::little, "SDF1 I/O assumes a little-endian host");

constexpr char kMagic[4] = {'S', 'D', 'F', '1'};
constexpr size_t kHeaderBytes = 4 + 3 * 4 + 6 * 8;

template <typename T>
void Put(std::vector<unsigned char>& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

template <typename T>
T Get(const std::vector<unsigned char>& in, size_t& pos) {
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::vector<unsigned char> EncodeSdf(const SdfGrid& grid) {
  ValidateSdfGrid(grid);
  std::vector<unsigned char> out(kMagic, kMagic + 4);
  out.reserve(kHeaderBytes + grid.NodeCount() * 8);
  for (int r : grid.resolution()) Put<uint32_t>(out, static_cast<uint32_t>(r));
  for (int a = 0; a < 3; ++a) Put<double>(out, grid.bounds().lo[a]);
  for (int a = 0; a < 3; ++a) Put<double>(out, grid.bounds().hi[a]);
  for (double v : grid.values()) Put<double>(out, v);
  return out;
}

SdfGrid DecodeSdf(const std::vector<unsigned char>& bytes, const std::string& source) {
  if (bytes.size() < kHeaderBytes) {
    throw IoError(source + ": truncated SDF1 header (" + std::to_string(bytes.size()) + " of " +
                  std::to_string(kHeaderBytes) + " bytes)");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw IoError(source + ": not an SDF1 file");
  size_t pos = 4;
  std::array<int, 3> res{};
  uint64_t nodes = 1;
  for (int a = 0; a < 3; ++a) {
    const uint32_t r = Get<uint32_t>(bytes, pos);
    if (r < 2 || r > (1u << 16)) throw IoError(source + ": bad SDF1 resolution " + std::to_string(r));
    res[a] = static_cast<int>(r);
    nodes *= r;
  }
  Aabb box;
  for (int a = 0; a < 3; ++a) box.lo[a] = Get<double>(bytes, pos);
  for (int a = 0; a < 3; ++a) box.hi[a] = Get<double>(bytes, pos);
  const uint64_t expected = kHeaderBytes + nodes * 8;
  if (bytes.size() != expected) {
    throw IoError(source + ": SDF1 payload size mismatch: expected " + std::to_string(expected) +
                  " bytes, got " + std::to_string(bytes.size()));
  }
  SdfGrid grid;
  try {
    grid = SdfGrid(box, res);
  } catch (const PreconditionError& e) {
    throw IoError(source + ": " + e.what());
  }
  for (double& v : grid.values()) v = Get<double>(bytes, pos);
  try {
    ValidateSdfGrid(grid);
  } catch (const PreconditionError& e) {
    throw IoError(source + ": " + e.what());
  }
  return grid;
}

void WriteSdf(const std::string& path, const SdfGrid& grid) { WriteFileBytes(path, EncodeSdf(grid)); }

SdfGrid ReadSdf(const std::string& path) { return DecodeSdf(ReadFileBytes(path), path); }

}  // namespace twinlight
