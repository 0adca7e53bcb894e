#include "twinlight/common/float_buffer.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

namespace twinlight {
namespace {

static_assert(std::endian::native == std::endian::little,
              "FB01 I/O assumes a little-endian host");

constexpr size_t kHeaderBytes = 16;

void PutU32(std::vector<unsigned char>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

uint32_t GetU32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<unsigned char> EncodeFloatBuffer(const Image& image) {
  for (float v : image.data) {
    if (!std::isfinite(v)) {
      throw PreconditionError("FB01 payload must be finite");
    }
  }
  std::vector<unsigned char> out;
  out.reserve(kHeaderBytes + image.data.size() * 4);
  out.insert(out.end(), kFloatBufferMagic, kFloatBufferMagic + 4);
  PutU32(out, static_cast<uint32_t>(image.width));
  PutU32(out, static_cast<uint32_t>(image.height));
  PutU32(out, static_cast<uint32_t>(image.channels));
  const size_t offset = out.size();
  out.resize(offset + image.data.size() * 4);
  std::memcpy(out.data() + offset, image.data.data(), image.data.size() * 4);
  return out;
}

Image DecodeFloatBuffer(const std::vector<unsigned char>& bytes,
                        const std::string& source_name) {
  if (bytes.size() < kHeaderBytes) {
    throw IoError(source_name + ": truncated FB01 header: expected " +
                  std::to_string(kHeaderBytes) + " bytes, got " +
                  std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), kFloatBufferMagic, 4) != 0) {
    throw IoError(source_name + ": bad magic, expected \"FB01\"");
  }
  const uint64_t w = GetU32(bytes.data() + 4);
  const uint64_t h = GetU32(bytes.data() + 8);
  const uint64_t c = GetU32(bytes.data() + 12);
  const uint64_t expected = w * h * c * 4;
  const uint64_t actual = bytes.size() - kHeaderBytes;
  if (expected != actual) {
    throw IoError(source_name + ": FB01 payload size mismatch: expected " +
                  std::to_string(expected) + " bytes, got " +
                  std::to_string(actual));
  }
  Image image(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c));
  std::memcpy(image.data.data(), bytes.data() + kHeaderBytes, expected);
  return image;
}

std::vector<unsigned char> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFileBytes(const std::string& path,
                    const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to '" + path + "'");
}

void WriteFloatBuffer(const std::string& path, const Image& image) {
  WriteFileBytes(path, EncodeFloatBuffer(image));
}

Image ReadFloatBuffer(const std::string& path) {
  return DecodeFloatBuffer(ReadFileBytes(path), path);
}

}  // namespace twinlight
