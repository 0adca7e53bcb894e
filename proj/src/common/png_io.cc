#include "twinlight/common/png_io.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace twinlight {
namespace {

unsigned char Quantize(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<unsigned char>(std::lround(c * 255.0f));
}

}  // namespace

void WritePng(const std::string& path, const Image& image) {
  Require(image.channels == 1 || image.channels == 3,
          "PNG writer expects 1 or 3 channels");
  std::vector<unsigned char> pixels(image.data.size());
  for (size_t i = 0; i < pixels.size(); ++i) pixels[i] = Quantize(image.data[i]);
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = image.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  // The simplified writer emits no tIME chunk, so output bytes are stable.
  if (!png_image_write_to_file(&png, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    const std::string why = png.message;
    png_image_free(&png);
    throw IoError("cannot write PNG '" + path + "': " + why);
  }
}

Image ReadPng(const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    const std::string why = png.message;
    png_image_free(&png);
    throw IoError("cannot read PNG '" + path + "': " + why);
  }
  png.format = PNG_FORMAT_RGB;
  std::vector<unsigned char> pixels(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, pixels.data(), 0, nullptr)) {
    const std::string why = png.message;
    png_image_free(&png);
    throw IoError("cannot decode PNG '" + path + "': " + why);
  }
  Image image(static_cast<int>(png.width), static_cast<int>(png.height), 3);
  for (size_t i = 0; i < pixels.size(); ++i) image.data[i] = pixels[i] / 255.0f;
  return image;
}

void WritePgm(const std::string& path, const Image& mask) {
  Require(mask.channels == 1, "PGM writer expects a single channel");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  for (float v : mask.data) out.put(static_cast<char>(v > 0.5f ? 255 : 0));
  if (!out) throw IoError("short write to '" + path + "'");
}

Image ReadPgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string magic;
  in >> magic;
  if (magic != "P5") throw IoError("'" + path + "': expected binary PGM (P5)");
  auto next_int = [&]() {
    while (in >> std::ws && in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
    }
    int v = -1;
    in >> v;
    return v;
  };
  const int w = next_int();
  const int h = next_int();
  const int maxval = next_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw IoError("'" + path + "': unsupported PGM header");
  }
  in.get();  // single whitespace byte before the raster
  Image mask(w, h, 1);
  std::vector<char> raster(mask.data.size());
  in.read(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (in.gcount() != static_cast<std::streamsize>(raster.size())) {
    throw IoError("'" + path + "': truncated PGM raster");
  }
  for (size_t i = 0; i < raster.size(); ++i) {
    mask.data[i] = static_cast<unsigned char>(raster[i]) != 0 ? 1.0f : 0.0f;
  }
  return mask;
}

}  // namespace twinlight
