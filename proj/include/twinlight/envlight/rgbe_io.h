#ifndef TWINLIGHT_ENVLIGHT_RGBE_IO_H_
#define TWINLIGHT_ENVLIGHT_RGBE_IO_H_

#include <string>
#include <vector>

#include "twinlight/common/image.h"
#include "twinlight/envlight/env_map.h"

namespace twinlight {

// Radiance RGBE (.hdr). The reader accepts "#?RADIANCE"/"#?RGBE" headers,
// FORMAT=32-bit_rle_rgbe, the "-Y H +X W" orientation, and flat, old-style
// run-length and adaptive RLE scanlines. The writer always emits adaptive
// RLE for widths in [8, 32767] and flat scanlines otherwise.
std::vector<unsigned char> EncodeRgbe(const Image& rgb);
Image DecodeRgbe(const std::vector<unsigned char>& bytes,
                 const std::string& source_name = "<memory>");

void WriteHdr(const std::string& path, const Image& rgb);
Image ReadHdr(const std::string& path);

void WriteEnvMap(const std::string& path, const EnvMap& env);
// Also checks the W = 2H env-map invariants.
EnvMap ReadEnvMap(const std::string& path);

}  // namespace twinlight

#endif  // TWINLIGHT_ENVLIGHT_RGBE_IO_H_
