#ifndef TWINLIGHT_COMMON_FLOAT_BUFFER_H_
#define TWINLIGHT_COMMON_FLOAT_BUFFER_H_

#include <string>
#include <vector>

#include "twinlight/common/image.h"

namespace twinlight {

// Raw float container "FB01":
//   bytes 0..3   magic "FB01"
//   bytes 4..15  width, height, channels as little-endian uint32
//   payload      width*height*channels float32 little-endian, row-major,
//                channel-interleaved
inline constexpr char kFloatBufferMagic[4] = {'F', 'B', '0', '1'};

std::vector<unsigned char> EncodeFloatBuffer(const Image& image);
Image DecodeFloatBuffer(const std::vector<unsigned char>& bytes,
                        const std::string& source_name = "<memory>");

// Writing rejects non-finite values; reading rejects short/long payloads with
// the expected and actual byte counts in the message.
void WriteFloatBuffer(const std::string& path, const Image& image);
Image ReadFloatBuffer(const std::string& path);

std::vector<unsigned char> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path,
                    const std::vector<unsigned char>& bytes);

}  // namespace twinlight

#endif  // TWINLIGHT_COMMON_FLOAT_BUFFER_H_
