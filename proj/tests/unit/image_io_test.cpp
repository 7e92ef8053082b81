#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dermveil/csv.hpp"
#include "dermveil/error.hpp"
#include "dermveil/image_io.hpp"
#include "dermveil/rng.hpp"
#include "oracles.hpp"

using namespace dermveil;

TEST(Image, RejectsEmptyDimensions) {
  EXPECT_THROW(RgbImage(0, 3), Error);
  EXPECT_THROW(BinaryMask(3, 0), Error);
}

TEST(Image, MaskSetOperations) {
  BinaryMask a(4, 3), b(4, 3);
  a.set(0, 0);
  a.set(2, 3);
  b.set(2, 3);
  EXPECT_EQ(a.count(), 2u);
  EXPECT_TRUE(b.is_subset_of(a));
  EXPECT_FALSE(a.is_subset_of(b));
  EXPECT_EQ((a & b).count(), 1u);
  EXPECT_EQ((a | b).count(), 2u);
  EXPECT_EQ((~a).count(), 10u);
}

TEST(ImageIo, PngAndPpmRoundTrip) {
  const auto dir = oracle::scratch_dir("io");
  Rng rng(5);
  RgbImage img(17, 9);
  for (auto& p : img.pixels()) {
    p = {static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
         static_cast<std::uint8_t>(rng.below(256))};
  }
  for (const char* name : {"a.png", "a.ppm"}) {
    write_image(dir / name, img);
    const RgbImage back = read_image(dir / name);
    ASSERT_EQ(back.size(), img.size());
    EXPECT_TRUE(std::equal(back.pixels().begin(), back.pixels().end(), img.pixels().begin()));
  }
  BinaryMask m(13, 7);
  for (std::size_t i = 0; i < m.pixel_count(); i += 3) m.set_index(i);
  for (const char* name : {"m.png", "m.pgm"}) {
    write_mask(dir / name, m);
    EXPECT_EQ(read_mask(dir / name), m);
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "m.png.tmp"));
}

TEST(ImageIo, CorruptFileIsAnError) {
  const auto dir = oracle::scratch_dir("io_bad");
  write_file_atomic(dir / "bad.png", "\x89PNG\r\n\x1a\n garbage");
  EXPECT_THROW(read_image(dir / "bad.png"), Error);
  write_file_atomic(dir / "bad.ppm", "P6\n4 4\n255\nabc");
  EXPECT_THROW(read_image(dir / "bad.ppm"), Error);
  EXPECT_THROW(read_image(dir / "missing.png"), Error);
}

TEST(Csv, NumbersRoundTripExactly) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, static_cast<int>(rng.below(20)) - 10);
    EXPECT_EQ(parse_number(format_number(v), "t"), v);
  }
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_THROW(parse_number("1.5x", "t"), Error);
  EXPECT_THROW(parse_integer("2.0", "t"), Error);
}

TEST(Csv, ParsesTableAndChecksWidth) {
  const CsvTable t = parse_csv("a,b\n1,2\n3,4\n", "t");
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.column("b"), 1u);
  EXPECT_THROW(t.column("c"), Error);
  EXPECT_THROW(parse_csv("a,b\n1\n", "t"), Error);
  EXPECT_EQ(join_csv_row({"x", "y"}), "x,y\n");
}
