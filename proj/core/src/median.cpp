#include <algorithm>
#include <string>

#include "dermveil/error.hpp"
#include "dermveil/features.hpp"

namespace dermveil {
namespace {

// Minimum-exchange selection network for the median of 25 (99 exchanges).
// Each pair (i, j) leaves min in i and max in j. Only the comparisons that
// can influence position 12 are kept, so the output is a partial sort.
constexpr std::array<std::array<std::uint8_t, 2>, 99> kNetwork25 = {{
    {0, 1},   {3, 4},   {2, 4},   {2, 3},   {6, 7},   {5, 7},   {5, 6},   {9, 10},
    {8, 10},  {8, 9},   {12, 13}, {11, 13}, {11, 12}, {15, 16}, {14, 16}, {14, 15},
    {18, 19}, {17, 19}, {17, 18}, {21, 22}, {20, 22}, {20, 21}, {23, 24}, {2, 5},
    {3, 6},   {0, 6},   {0, 3},   {4, 7},   {1, 7},   {1, 4},   {11, 14}, {8, 14},
    {8, 11},  {12, 15}, {9, 15},  {9, 12},  {13, 16}, {10, 16}, {10, 13}, {20, 23},
    {17, 23}, {17, 20}, {21, 24}, {18, 24}, {18, 21}, {19, 22}, {8, 17},  {9, 18},
    {0, 18},  {0, 9},   {10, 19}, {1, 19},  {1, 10},  {11, 20}, {2, 20},  {2, 11},
    {12, 21}, {3, 21},  {3, 12},  {13, 22}, {4, 22},  {4, 13},  {14, 23}, {5, 23},
    {5, 14},  {15, 24}, {6, 24},  {6, 15},  {7, 16},  {7, 19},  {13, 21}, {15, 23},
    {7, 13},  {7, 15},  {1, 9},   {3, 11},  {5, 17},  {11, 17}, {9, 17},  {4, 10},
    {6, 12},  {7, 14},  {4, 6},   {4, 7},   {12, 14}, {10, 14}, {6, 7},   {10, 12},
    {6, 10},  {6, 17},  {12, 17}, {7, 17},  {7, 10},  {12, 18}, {7, 12},  {10, 18},
    {12, 20}, {10, 20}, {10, 12},
}};

}  // namespace

std::span<const std::array<std::uint8_t, 2>> median25_exchanges() { return kNetwork25; }

void median25_network(std::array<double, 25>& v) {
  for (const auto& [i, j] : kNetwork25) {
    const double lo = std::min(v[i], v[j]);
    const double hi = std::max(v[i], v[j]);
    v[i] = lo;
    v[j] = hi;
  }
}

double median25(std::span<const double> values) {
  if (values.size() != 25) {
    throw Error(ErrorKind::InvalidArgument,
                "median25 needs exactly 25 values, got " + std::to_string(values.size()));
  }
  std::array<double, 25> v;
  std::copy(values.begin(), values.end(), v.begin());
  median25_network(v);
  return v[12];
}

std::vector<double> masked_median(std::span<const double> plane, const BinaryMask& valid,
                                  int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "median window must be odd and positive");
  }
  if (plane.size() != valid.pixel_count()) {
    throw Error(ErrorKind::InvalidArgument, "plane size differs from mask size");
  }
  const int w = valid.width();
  const int h = valid.height();
  const int half = window / 2;
  std::vector<double> out(plane.size(), 0.0);
  std::vector<double> scratch;
  scratch.reserve(static_cast<std::size_t>(window) * window);
  std::array<double, 25> net{};

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!valid.test(r, c)) continue;
      scratch.clear();
      for (int rr = std::max(0, r - half); rr <= std::min(h - 1, r + half); ++rr) {
        for (int cc = std::max(0, c - half); cc <= std::min(w - 1, c + half); ++cc) {
          if (valid.test(rr, cc)) scratch.push_back(plane[static_cast<std::size_t>(rr) * w + cc]);
        }
      }
      double median;
      if (scratch.size() == 25) {
        std::copy(scratch.begin(), scratch.end(), net.begin());
        median25_network(net);
        median = net[12];
      } else {
        const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>((scratch.size() - 1) / 2);
        std::nth_element(scratch.begin(), mid, scratch.end());
        median = *mid;
      }
      out[static_cast<std::size_t>(r) * w + c] = median;
    }
  }
  return out;
}

}  // namespace dermveil
