#include "twinlight/common/image.h"

namespace twinlight {

Image::Image(int w, int h, int c, float fill)
    : width(w), height(h), channels(c) {
  Require(w >= 0 && h >= 0 && c >= 0, "image dimensions must be non-negative");
  data.assign(static_cast<size_t>(w) * h * c, fill);
}

Image Image::Channels(int first, int count) const {
  Require(first >= 0 && count > 0 && first + count <= channels,
          "channel range out of bounds");
  Image out(width, height, count);
  for (size_t p = 0; p < PixelCount(); ++p) {
    for (int c = 0; c < count; ++c) {
      out.data[p * count + c] = data[p * channels + first + c];
    }
  }
  return out;
}

}  // namespace twinlight
