#include "twinlight/envlight/rgbe_io.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include "twinlight/common/float_buffer.h"

namespace twinlight {
namespace {

using Rgbe = std::array<unsigned char, 4>;

Rgbe FloatToRgbe(float r, float g, float b) {
  const float v = std::max({r, g, b});
  if (!(v >= 1e-32f)) return {0, 0, 0, 0};
  int e = 0;
  const float scale = std::frexp(v, &e) * 256.0f / v;
  auto q = [&](float c) {
    return static_cast<unsigned char>(std::min(255.0f, std::max(0.0f, c * scale)));
  };
  return {q(r), q(g), q(b), static_cast<unsigned char>(e + 128)};
}

void RgbeToFloat(const Rgbe& p, float* out) {
  if (p[3] == 0) {
    out[0] = out[1] = out[2] = 0.0f;
    return;
  }
  const float f = std::ldexp(1.0f, static_cast<int>(p[3]) - (128 + 8));
  for (int c = 0; c < 3; ++c) out[c] = p[c] * f;
}

void AppendRleChannel(std::vector<unsigned char>& out, const unsigned char* data, int n) {
  constexpr int kMinRun = 4;
  int cur = 0;
  while (cur < n) {
    int beg_run = cur;
    int run_count = 0;
    int old_run_count = 0;
    while (run_count < kMinRun && beg_run < n) {
      beg_run += run_count;
      old_run_count = run_count;
      run_count = 1;
      while (beg_run + run_count < n && run_count < 127 &&
             data[beg_run] == data[beg_run + run_count]) {
        ++run_count;
      }
    }
    // A short run right before the long one is cheaper emitted as a run.
    if (old_run_count > 1 && old_run_count == beg_run - cur) {
      out.push_back(static_cast<unsigned char>(128 + old_run_count));
      out.push_back(data[cur]);
      cur = beg_run;
    }
    while (cur < beg_run) {
      int nonrun = std::min(128, beg_run - cur);
      out.push_back(static_cast<unsigned char>(nonrun));
      out.insert(out.end(), data + cur, data + cur + nonrun);
      cur += nonrun;
    }
    if (run_count >= kMinRun) {
      out.push_back(static_cast<unsigned char>(128 + run_count));
      out.push_back(data[beg_run]);
      cur += run_count;
    }
  }
}

class Cursor {
 public:
  Cursor(const std::vector<unsigned char>& bytes, size_t pos, const std::string& name)
      : bytes_(bytes), pos_(pos), name_(name) {}
  unsigned char Next() {
    if (pos_ >= bytes_.size()) throw IoError(name_ + ": truncated RGBE scanline data");
    return bytes_[pos_++];
  }
  bool AtEnd() const { return pos_ >= bytes_.size(); }

 private:
  const std::vector<unsigned char>& bytes_;
  size_t pos_;
  const std::string& name_;
};

// Flat scanline, possibly using old-style (1,1,1,n) repeat codes.
void ReadFlatScanline(Cursor& in, Rgbe first, std::vector<Rgbe>& line, const std::string& name) {
  const int w = static_cast<int>(line.size());
  int x = 0;
  int shift = 0;
  bool have_first = true;
  while (x < w) {
    Rgbe p;
    if (have_first) {
      p = first;
      have_first = false;
    } else {
      for (auto& b : p) b = in.Next();
    }
    if (p[0] == 1 && p[1] == 1 && p[2] == 1) {
      if (x == 0) throw IoError(name + ": run-length code at start of scanline");
      const int count = p[3] << shift;
      if (x + count > w) throw IoError(name + ": run-length overruns scanline");
      for (int i = 0; i < count; ++i, ++x) line[x] = line[x - 1];
      shift += 8;
    } else {
      line[x++] = p;
      shift = 0;
    }
  }
}

}  // namespace

std::vector<unsigned char> EncodeRgbe(const Image& rgb) {
  Require(rgb.channels == 3, "RGBE writer expects 3 channels");
  for (float v : rgb.data) Require(std::isfinite(v), "RGBE writer needs finite values");
  const std::string header = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " +
                             std::to_string(rgb.height) + " +X " + std::to_string(rgb.width) + "\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  const int w = rgb.width;
  const bool rle = w >= 8 && w <= 32767;
  std::vector<unsigned char> planes(static_cast<size_t>(w) * 4);
  for (int y = 0; y < rgb.height; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgbe p = FloatToRgbe(rgb.at(x, y, 0), rgb.at(x, y, 1), rgb.at(x, y, 2));
      if (!rle) {
        out.insert(out.end(), p.begin(), p.end());
      } else {
        for (int c = 0; c < 4; ++c) planes[static_cast<size_t>(c) * w + x] = p[c];
      }
    }
    if (rle) {
      out.push_back(2);
      out.push_back(2);
      out.push_back(static_cast<unsigned char>(w >> 8));
      out.push_back(static_cast<unsigned char>(w & 0xff));
      for (int c = 0; c < 4; ++c) AppendRleChannel(out, planes.data() + static_cast<size_t>(c) * w, w);
    }
  }
  return out;
}

Image DecodeRgbe(const std::vector<unsigned char>& bytes, const std::string& name) {
  size_t pos = 0;
  auto read_line = [&]() {
    std::string line;
    while (pos < bytes.size() && bytes[pos] != '\n') line.push_back(static_cast<char>(bytes[pos++]));
    if (pos >= bytes.size()) throw IoError(name + ": truncated RGBE header");
    ++pos;
    return line;
  };
  const std::string magic = read_line();
  if (magic.rfind("#?RADIANCE", 0) != 0 && magic.rfind("#?RGBE", 0) != 0) {
    throw IoError(name + ": missing #?RADIANCE signature");
  }
  for (;;) {
    const std::string line = read_line();
    if (line.empty()) break;
    if (line.rfind("FORMAT=", 0) == 0 && line != "FORMAT=32-bit_rle_rgbe") {
      throw IoError(name + ": unsupported " + line);
    }
  }
  const std::string res = read_line();
  int h = 0, w = 0;
  char tail = 0;
  if (std::sscanf(res.c_str(), "-Y %d +X %d%c", &h, &w, &tail) != 2 || h <= 0 || w <= 0) {
    throw IoError(name + ": unsupported resolution line '" + res + "' (need -Y H +X W)");
  }
  Image img(w, h, 3);
  Cursor in(bytes, pos, name);
  std::vector<Rgbe> line(w);
  std::vector<unsigned char> planes(static_cast<size_t>(w) * 4);
  for (int y = 0; y < h; ++y) {
    Rgbe head;
    for (auto& b : head) b = in.Next();
    const bool adaptive = w >= 8 && w <= 32767 && head[0] == 2 && head[1] == 2 && !(head[2] & 0x80);
    if (!adaptive) {
      ReadFlatScanline(in, head, line, name);
    } else {
      if (((head[2] << 8) | head[3]) != w) throw IoError(name + ": scanline width mismatch");
      for (int c = 0; c < 4; ++c) {
        unsigned char* plane = planes.data() + static_cast<size_t>(c) * w;
        int x = 0;
        while (x < w) {
          int count = in.Next();
          if (count > 128) {
            count -= 128;
            if (x + count > w) throw IoError(name + ": RLE run overruns scanline");
            const unsigned char v = in.Next();
            for (int i = 0; i < count; ++i) plane[x++] = v;
          } else {
            if (count == 0 || x + count > w) throw IoError(name + ": bad RLE literal count");
            for (int i = 0; i < count; ++i) plane[x++] = in.Next();
          }
        }
      }
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 4; ++c) line[x][c] = planes[static_cast<size_t>(c) * w + x];
      }
    }
    for (int x = 0; x < w; ++x) RgbeToFloat(line[x], &img.at(x, y, 0));
  }
  return img;
}

void WriteHdr(const std::string& path, const Image& rgb) { WriteFileBytes(path, EncodeRgbe(rgb)); }

Image ReadHdr(const std::string& path) { return DecodeRgbe(ReadFileBytes(path), path); }

void WriteEnvMap(const std::string& path, const EnvMap& env) {
  ValidateEnvMap(env);
  WriteHdr(path, env.radiance);
}

EnvMap ReadEnvMap(const std::string& path) {
  EnvMap env(ReadHdr(path));
  try {
    ValidateEnvMap(env);
  } catch (const PreconditionError& e) {
    throw IoError(path + ": " + e.what());
  }
  return env;
}

}  // namespace twinlight
