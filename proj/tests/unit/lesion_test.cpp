#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dermveil/error.hpp"
#include "dermveil/lesion.hpp"
#include "dermveil/rng.hpp"

using namespace dermveil;

namespace {

BinaryMask ellipse(int w, int h, double cr, double cc, double a, double b, double angle = 0) {
  BinaryMask m(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double x = (c - cc) * std::cos(angle) + (r - cr) * std::sin(angle);
      const double y = -(c - cc) * std::sin(angle) + (r - cr) * std::cos(angle);
      if ((x * x) / (a * a) + (y * y) / (b * b) <= 1.0) m.set(r, c);
    }
  }
  return m;
}

BinaryMask rect(int w, int h, int r0, int c0, int rows, int cols) {
  BinaryMask m(w, h);
  for (int r = r0; r < r0 + rows; ++r) {
    for (int c = c0; c < c0 + cols; ++c) m.set(r, c);
  }
  return m;
}

BinaryMask transpose(const BinaryMask& m) {
  BinaryMask t(m.height(), m.width());
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) t.set(c, r, m.test(r, c));
  }
  return t;
}

BinaryMask flip_rows(const BinaryMask& m) {
  BinaryMask f(m.width(), m.height());
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) f.set(m.height() - 1 - r, c, m.test(r, c));
  }
  return f;
}

BinaryMask shift(const BinaryMask& m, int dr, int dc) {
  BinaryMask s(m.width(), m.height());
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) {
      if (m.test(r, c)) s.set(r + dr, c + dc);
    }
  }
  return s;
}

BinaryMask irregular(Rng& rng) {
  BinaryMask m(80, 80);
  const double p3 = rng.uniform(0, 6.28), p5 = rng.uniform(0, 6.28);
  for (int r = 0; r < 80; ++r) {
    for (int c = 0; c < 80; ++c) {
      const double t = std::atan2(r - 38.0, c - 37.0);
      const double rad = 22 * (1 + 0.3 * std::sin(3 * t + p3) + 0.1 * std::sin(5 * t + p5));
      if (std::hypot(r - 38.0, c - 37.0) <= rad) m.set(r, c);
    }
  }
  return m;
}

}  // namespace

TEST(Moments, MatchDirectDefinition) {
  Rng rng(1);
  BinaryMask m(23, 17);
  for (std::size_t i = 0; i < m.pixel_count(); ++i) m.set_index(i, rng.uniform() < 0.4);
  double n = 0, sr = 0, sc = 0;
  for (int r = 0; r < 17; ++r) {
    for (int c = 0; c < 23; ++c) {
      if (!m.test(r, c)) continue;
      n += 1;
      sr += r;
      sc += c;
    }
  }
  const double cr = sr / n, cc = sc / n;
  double mu20 = 0, mu02 = 0, mu11 = 0;
  for (int r = 0; r < 17; ++r) {
    for (int c = 0; c < 23; ++c) {
      if (!m.test(r, c)) continue;
      mu20 += (r - cr) * (r - cr);
      mu02 += (c - cc) * (c - cc);
      mu11 += (r - cr) * (c - cc);
    }
  }
  const Moments got = central_moments(m);
  EXPECT_EQ(got.m00, n);
  EXPECT_NEAR(got.mu20, mu20, 1e-9 * mu20);
  EXPECT_NEAR(got.mu02, mu02, 1e-9 * mu02);
  EXPECT_NEAR(got.mu11, mu11, 1e-9 * std::max(1.0, std::abs(mu11)));
  EXPECT_GE(got.mu20 * got.mu02 - got.mu11 * got.mu11, 0.0);
  EXPECT_THROW(central_moments(BinaryMask(3, 3)), Error);
}

TEST(VeilRatio, Arithmetic) {
  const BinaryMask lesion = rect(200, 100, 0, 0, 100, 100);
  const BinaryMask veil = rect(200, 100, 0, 0, 5, 100);
  EXPECT_DOUBLE_EQ(veil_ratio(veil, lesion), 0.05);
  EXPECT_EQ(veil_ratio(BinaryMask(200, 100), lesion), 0.0);
  EXPECT_EQ(veil_ratio(lesion, lesion), 1.0);
  EXPECT_THROW(veil_ratio(veil, BinaryMask(200, 100)), Error);
  EXPECT_THROW(veil_ratio(rect(200, 100, 0, 150, 3, 3), lesion), Error);
}

TEST(Circularity, ThreeByThreeSquare) {
  const double s2 = circularity(rect(5, 5, 1, 1, 3, 3));
  EXPECT_NEAR(s2, (1 + std::sqrt(2.0)) * (1 + std::sqrt(2.0)), 1e-9);
  EXPECT_NEAR(s2, 5.828, 0.01);
}

TEST(Circularity, DiskBeatsThinRectangle) {
  const BinaryMask d = ellipse(100, 100, 50, 50, 40, 40);
  const BinaryMask r = rect(200, 40, 15, 20, 10, 160);
  EXPECT_GT(circularity(d), circularity(r));
}

TEST(Circularity, CapAndErrors) {
  // Plus shape: the four arms are the boundary, all at distance 1.
  BinaryMask plus(3, 3);
  plus.set(0, 1);
  plus.set(1, 0);
  plus.set(1, 1);
  plus.set(1, 2);
  plus.set(2, 1);
  EXPECT_EQ(circularity(plus), kCircularityCap);
  BinaryMask one(3, 3);
  one.set(1, 1);
  EXPECT_THROW(circularity(one), Error);
}

TEST(Ellipticity, EllipsesAndSquare) {
  for (const double ratio : {1.0, 2.0, 4.0}) {
    const double b = 25, a = b * ratio;
    const BinaryMask m = ellipse(240, 80, 40, 120, a, b);
    const double s3 = ellipticity(m);
    EXPECT_GE(s3, 0.97) << ratio;
    EXPECT_LE(s3, 1.0) << ratio;
  }
  const double square = ellipticity(rect(120, 120, 10, 10, 100, 100));
  EXPECT_NEAR(square, 144 / (16 * std::numbers::pi * std::numbers::pi), 0.01);
  const double n = 100;
  // Discrete moments: mu20 = mu02 = n^2 (n^2 - 1) / 12, mu11 = 0.
  const double exact =
      144 * n * n * n * n / (16 * std::numbers::pi * std::numbers::pi * (n * n - 1) * (n * n - 1));
  EXPECT_NEAR(square, exact, 1e-12);
  EXPECT_THROW(ellipticity(rect(50, 50, 10, 5, 1, 30)), Error);
}

TEST(Ellipticity, NeverAboveOne) {
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    EXPECT_LE(ellipticity(irregular(rng)), 1.0);
    const BinaryMask e = ellipse(100, 100, 50, 50, rng.uniform(5, 45), rng.uniform(5, 45),
                                 rng.uniform(0, 3.14));
    EXPECT_LE(ellipticity(e), 1.0);
  }
}

TEST(ShapeFeatures, TranslationAndRotationInvariance) {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const BinaryMask m = irregular(rng);
    const double s2 = circularity(m), s3 = ellipticity(m);
    const BinaryMask moved = shift(m, 3, -2);
    EXPECT_EQ(circularity(moved), s2);
    EXPECT_EQ(ellipticity(moved), s3);
    EXPECT_EQ(circularity(transpose(m)), s2);
    EXPECT_EQ(ellipticity(transpose(m)), s3);
    EXPECT_EQ(circularity(flip_rows(m)), s2);
    EXPECT_EQ(ellipticity(flip_rows(m)), s3);
  }
}

TEST(ShapeFeatures, DiskScaleStability) {
  const double s20 = ellipticity(ellipse(200, 200, 100, 100, 20, 20));
  const double s40 = ellipticity(ellipse(200, 200, 100, 100, 40, 40));
  const double s80 = ellipticity(ellipse(200, 200, 100, 100, 80, 80));
  EXPECT_NEAR(s20, s40, 0.02);
  EXPECT_NEAR(s40, s80, 0.02);
}

TEST(ReferenceModel, ThresholdBehaviour) {
  const DecisionTree model = reference_lesion_model();
  EXPECT_EQ(classify_lesion({0.005, 3, 0.5}, model), Diagnosis::Benign);
  EXPECT_EQ(classify_lesion({0.05, 3, 0.99}, model), Diagnosis::Benign);
  EXPECT_EQ(classify_lesion({0.05, 3, 0.50}, model), Diagnosis::Melanoma);
  EXPECT_EQ(classify_lesion({0.0, 1e6, 0.1}, model), Diagnosis::Benign);
  // S1 exactly 0.009 is not "less than 0.009".
  EXPECT_EQ(classify_lesion({0.009, 3, 0.5}, model), Diagnosis::Melanoma);
  EXPECT_EQ(classify_lesion({0.009, 3, 0.98}, model), Diagnosis::Benign);
  EXPECT_EQ(classify_lesion({0.05, 3, 0.979}, model), Diagnosis::Melanoma);
  EXPECT_EQ(model.features_used(), (std::vector<int>{0, 2}));
}

TEST(ReferenceModel, CircularityNeverMatters) {
  const DecisionTree model = reference_lesion_model();
  Rng rng(4);
  for (int t = 0; t < 2000; ++t) {
    const double s1 = rng.uniform(0, 0.1), s3 = rng.uniform(0.4, 1.0);
    EXPECT_EQ(classify_lesion({s1, rng.uniform(0, 50), s3}, model),
              classify_lesion({s1, rng.uniform(0, 1e6), s3}, model));
  }
}

TEST(LesionModel, TrainedModelSurvivesSerialization) {
  Rng rng(5);
  std::vector<LabeledRow> rows;
  for (int i = 0; i < 200; ++i) {
    LabeledRow row{{rng.uniform(0, 0.2), rng.uniform(1, 20), rng.uniform(0.5, 1)}, 0};
    row.label = row.features[0] >= 0.02 && row.features[2] <= 0.95;
    rows.push_back(row);
  }
  const DecisionTree tree = induce(rows, {}, {"benign", "melanoma"});
  const DecisionTree back = tree_from_json(tree_to_json(tree));
  for (double s1 = 0; s1 <= 0.2; s1 += 0.01) {
    for (double s3 = 0.5; s3 <= 1.0; s3 += 0.02) {
      EXPECT_EQ(classify_lesion({s1, 5, s3}, tree), classify_lesion({s1, 5, s3}, back));
    }
  }
  EXPECT_THROW(classify_lesion({0, 0, 0}, DecisionTree::constant(18, {"benign", "melanoma"}, 0)),
               Error);
}
