#ifndef TWINLIGHT_COMMON_PNG_IO_H_
#define TWINLIGHT_COMMON_PNG_IO_H_

#include <string>

#include "twinlight/common/image.h"

namespace twinlight {

// 8-bit PNG. Values are display-encoded in [0,1] and stored as
// round(clamp(v)*255). Gray, RGB and RGBA inputs load as 3 channels
// (alpha dropped); 16-bit files are reduced to 8 bits.
void WritePng(const std::string& path, const Image& image);
Image ReadPng(const std::string& path);

// Binary PGM (P5, maxval 255) single-channel mask; nonzero reads as 1.
void WritePgm(const std::string& path, const Image& mask);
Image ReadPgm(const std::string& path);

}  // namespace twinlight

#endif  // TWINLIGHT_COMMON_PNG_IO_H_
