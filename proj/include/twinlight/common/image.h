#ifndef TWINLIGHT_COMMON_IMAGE_H_
#define TWINLIGHT_COMMON_IMAGE_H_

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace twinlight {

// Raised when an operation's documented precondition does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised for unreadable, unwritable or malformed files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row-major, channel-interleaved float raster. Row 0 is the top row.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c, float fill = 0.0f);

  size_t PixelCount() const { return static_cast<size_t>(width) * height; }
  bool empty() const { return data.empty(); }

  size_t Offset(int x, int y) const {
    return (static_cast<size_t>(y) * width + x) * channels;
  }
  float& at(int x, int y, int c) { return data[Offset(x, y) + c]; }
  float at(int x, int y, int c) const { return data[Offset(x, y) + c]; }

  std::span<float> Pixel(int x, int y) {
    return {data.data() + Offset(x, y), static_cast<size_t>(channels)};
  }
  std::span<const float> Pixel(int x, int y) const {
    return {data.data() + Offset(x, y), static_cast<size_t>(channels)};
  }

  bool SameShape(const Image& other) const {
    return width == other.width && height == other.height &&
           channels == other.channels;
  }
  bool SameSize(const Image& other) const {
    return width == other.width && height == other.height;
  }

  // Copies channels [first, first + count) into a new image.
  Image Channels(int first, int count) const;

  bool operator==(const Image&) const = default;
};

// Throws PreconditionError with `what` when `ok` is false.
inline void Require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

}  // namespace twinlight

#endif  // TWINLIGHT_COMMON_IMAGE_H_
