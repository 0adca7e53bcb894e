#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"
#include "twinlight/common/float_buffer.h"
#include "twinlight/common/image.h"
#include "twinlight/common/kv_text.h"
#include "twinlight/common/parallel.h"
#include "twinlight/common/png_io.h"
#include "twinlight/common/reduce.h"
#include "twinlight/common/rng.h"

namespace twinlight {
namespace {

Image Ramp(int w, int h, int c) {
  Image img(w, h, c);
  for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = 0.001f * static_cast<float>(i);
  return img;
}

TEST(FloatBufferTest, RoundTripIsBitExact) {
  const Image img = Ramp(7, 5, 3);
  const auto bytes = EncodeFloatBuffer(img);
  ASSERT_EQ(bytes.size(), 16u + 7 * 5 * 3 * 4);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "FB01");
  EXPECT_EQ(bytes[4], 7);
  EXPECT_EQ(bytes[8], 5);
  EXPECT_EQ(bytes[12], 3);
  EXPECT_EQ(DecodeFloatBuffer(bytes), img);
}

TEST(FloatBufferTest, TruncatedPayloadReportsByteCounts) {
  auto bytes = EncodeFloatBuffer(Ramp(4, 4, 2));
  bytes.resize(bytes.size() - 6);
  try {
    DecodeFloatBuffer(bytes, "x.fb");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("expected 128 bytes, got 122"), std::string::npos)
        << e.what();
  }
}

TEST(FloatBufferTest, RejectsBadMagicAndNonFinite) {
  auto bytes = EncodeFloatBuffer(Ramp(1, 1, 1));
  bytes[0] = 'X';
  EXPECT_THROW(DecodeFloatBuffer(bytes), IoError);
  Image bad(1, 1, 1);
  bad.data[0] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(EncodeFloatBuffer(bad), PreconditionError);
}

TEST(FloatBufferTest, FileRoundTripAndMissingPath) {
  const auto dir = testing::ScratchDir();
  const Image img = Ramp(3, 2, 8);
  WriteFloatBuffer((dir / "a.fb").string(), img);
  EXPECT_EQ(ReadFloatBuffer((dir / "a.fb").string()), img);
  try {
    ReadFloatBuffer((dir / "missing.fb").string());
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.fb"), std::string::npos);
  }
}

TEST(PngTest, RgbRoundTripQuantizes) {
  const auto dir = testing::ScratchDir();
  Image img(4, 3, 3);
  for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<float>(i % 256) / 255.0f;
  img.data[0] = 2.0f;   // clamps to 1
  img.data[1] = -1.0f;  // clamps to 0
  WritePng((dir / "a.png").string(), img);
  const Image back = ReadPng((dir / "a.png").string());
  ASSERT_TRUE(back.SameShape(img));
  EXPECT_FLOAT_EQ(back.data[0], 1.0f);
  EXPECT_FLOAT_EQ(back.data[1], 0.0f);
  for (size_t i = 2; i < img.data.size(); ++i) EXPECT_NEAR(back.data[i], img.data[i], 0.5 / 255);
}

TEST(PngTest, GrayLoadsAsThreeChannels) {
  const auto dir = testing::ScratchDir();
  Image img(2, 2, 1, 0.5f);
  WritePng((dir / "g.png").string(), img);
  const Image back = ReadPng((dir / "g.png").string());
  EXPECT_EQ(back.channels, 3);
  EXPECT_NEAR(back.at(1, 1, 2), 128.0 / 255, 1e-6);
}

TEST(PgmTest, MaskRoundTrip) {
  const auto dir = testing::ScratchDir();
  Image mask(5, 2, 1);
  mask.at(1, 0, 0) = 1.0f;
  mask.at(4, 1, 0) = 1.0f;
  WritePgm((dir / "m.pgm").string(), mask);
  EXPECT_EQ(ReadPgm((dir / "m.pgm").string()), mask);
}

TEST(KvTextTest, SectionsLabelsAndLastAssignmentWins) {
  const KvDocument doc = ParseKvText(
      "# header\n"
      "[background]\n"
      "mesh = ground.ply  \n"
      "[actor \"car_1\"]\n"
      "mesh = car.ply\n"
      "mesh = car2.ply\n"
      "[actor \"cone\"]\n"
      "trajectory=cone.txt\n",
      "scene.txt");
  ASSERT_EQ(doc.sections.size(), 3u);
  EXPECT_EQ(doc.First("background")->Find("mesh")->value, "ground.ply");
  const auto actors = doc.All("actor");
  ASSERT_EQ(actors.size(), 2u);
  EXPECT_EQ(actors[0]->label, "car_1");
  EXPECT_EQ(actors[0]->Find("mesh")->line, 6);
  EXPECT_EQ(actors[1]->Find("trajectory")->value, "cone.txt");
  EXPECT_EQ(doc.First("lighting"), nullptr);
}

TEST(KvTextTest, ErrorsCarryLineAndColumn) {
  try {
    ParseKvText("[camera]\nwidth 64\n", "cam.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(std::string(e.what()).rfind("cam.txt:2:", 0), 0u) << e.what();
  }
  EXPECT_THROW(ParseKvText("[camera\n", "x"), ParseError);
  const KvDocument doc = ParseKvText("[c]\nfx = 12abc\nlist = 1, 2 3\n", "c.txt");
  try {
    ParseDouble("c.txt", *doc.First("c")->Find("fx"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 6);
  }
  EXPECT_EQ(ParseDoubleList("c.txt", *doc.First("c")->Find("list")),
            (std::vector<double>{1, 2, 3}));
}

TEST(ParallelTest, ThreadsVariableAndDisjointWrites) {
  for (int threads : {1, 2, 8}) {
    testing::ScopedThreads scoped(threads);
    EXPECT_EQ(ThreadCount(), threads);
    std::vector<int> out(1000, 0);
    ParallelFor(0, 1000, [&](int i) { out[i] = i * i; });
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(out[i], i * i);
  }
  testing::ScopedThreads zero(0);
  EXPECT_GE(ThreadCount(), 1);
}

TEST(ParallelTest, RethrowsBodyException) {
  testing::ScopedThreads scoped(4);
  EXPECT_THROW(ParallelFor(0, 100,
                           [](int i) {
                             if (i == 37) throw PreconditionError("boom");
                           }),
               PreconditionError);
}

TEST(RngTest, CounterStreamsAreReproducibleAndDistinct) {
  CounterRng a(7, kDomainTest, 3), b(7, kDomainTest, 3), c(7, kDomainTest, 4);
  for (int i = 0; i < 10; ++i) {
    const uint64_t va = a.NextU64();
    EXPECT_EQ(va, b.NextU64());
    EXPECT_NE(va, c.NextU64());
  }
  CounterRng u(1, kDomainTest, 0);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.Uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    sum += x;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(ReduceTest, PairwiseSumMatchesExactSum) {
  std::vector<double> v(1001);
  std::iota(v.begin(), v.end(), 0.0);
  EXPECT_EQ(PairwiseSum(v), 500500.0);
  EXPECT_EQ(PairwiseSum({}), 0.0);
}

}  // namespace
}  // namespace twinlight
