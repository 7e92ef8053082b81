#include "dermveil/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "dermveil/error.hpp"

namespace dermveil {
namespace {

constexpr std::int64_t kUnreachable = -1;

bool same_point(const PointF& a, const PointF& b) {
  return a.row == b.row && a.col == b.col;
}

// One-dimensional squared EDT over f, where kUnreachable marks "no source".
// Lower envelope of parabolas; only finite entries take part.
void edt_1d(std::span<const std::int64_t> f, std::span<std::int64_t> d,
            std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  auto intersect = [&](int q, int p) {
    const double num = static_cast<double>((f[q] + std::int64_t{q} * q) -
                                           (f[p] + std::int64_t{p} * p));
    return num / (2.0 * (q - p));
  };

  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kUnreachable) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -std::numeric_limits<double>::infinity();
      z[1] = std::numeric_limits<double>::infinity();
      continue;
    }
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }

  if (k < 0) {
    std::fill(d.begin(), d.end(), kUnreachable);
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const std::int64_t dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

// Integer pixel line between two points, 8-connected (Bresenham).
template <typename Plot>
void draw_line(int r0, int c0, int r1, int c1, Plot&& plot) {
  const int dr = std::abs(r1 - r0);
  const int dc = std::abs(c1 - c0);
  const int sr = r0 < r1 ? 1 : -1;
  const int sc = c0 < c1 ? 1 : -1;
  int err = dc - dr;
  while (true) {
    plot(r0, c0);
    if (r0 == r1 && c0 == c1) break;
    const int e2 = 2 * err;
    if (e2 > -dr) {
      err -= dr;
      c0 += sc;
    }
    if (e2 < dc) {
      err += dc;
      r0 += sr;
    }
  }
}

std::size_t quota(double fraction, std::size_t area) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(area) + 1e-9));
}

}  // namespace

ControlPolygon::ControlPolygon(std::vector<PointF> points) : points_(std::move(points)) {
  if (points_.size() < 3) {
    throw Error(ErrorKind::InvalidPolygon,
                "border needs at least 3 control points, got " +
                    std::to_string(points_.size()));
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const PointF& p = points_[i];
    if (!std::isfinite(p.row) || !std::isfinite(p.col)) {
      throw Error(ErrorKind::InvalidPolygon,
                  "control point " + std::to_string(i) + " is not finite");
    }
    if (same_point(p, points_[(i + 1) % points_.size()])) {
      throw Error(ErrorKind::InvalidPolygon,
                  "control points " + std::to_string(i) + " and " +
                      std::to_string((i + 1) % points_.size()) + " coincide");
    }
  }
}

DistanceField::DistanceField(int width, int height, std::vector<std::int64_t> squared)
    : width_(width), height_(height), squared_(std::move(squared)) {}

double DistanceField::at(int row, int col) const {
  return std::sqrt(static_cast<double>(squared_at(row, col)));
}

std::vector<PointF> spline_close(const ControlPolygon& poly, int samples_per_segment) {
  if (samples_per_segment < 1) {
    throw Error(ErrorKind::InvalidArgument, "samples_per_segment must be positive");
  }
  const auto pts = poly.points();
  const std::size_t n = pts.size();
  std::vector<PointF> curve;
  curve.reserve(n * static_cast<std::size_t>(samples_per_segment) + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const PointF& p0 = pts[i];
    const PointF& p1 = pts[(i + 1) % n];
    const PointF& p2 = pts[(i + 2) % n];
    for (int k = 0; k < samples_per_segment; ++k) {
      const double t = static_cast<double>(k) / samples_per_segment;
      const double b0 = 0.5 * (1.0 - t) * (1.0 - t);
      const double b1 = -t * t + t + 0.5;
      const double b2 = 0.5 * t * t;
      curve.push_back({b0 * p0.row + b1 * p1.row + b2 * p2.row,
                       b0 * p0.col + b1 * p1.col + b2 * p2.col});
    }
  }
  curve.push_back(curve.front());
  return curve;
}

int auto_samples_per_segment(const ControlPolygon& poly, double max_spacing) {
  if (!(max_spacing > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "max_spacing must be positive");
  }
  // Curve speed on a segment is bounded by the longer adjacent control edge.
  const auto pts = poly.points();
  double longest = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const PointF& a = pts[i];
    const PointF& b = pts[(i + 1) % pts.size()];
    longest = std::max(longest, std::hypot(b.row - a.row, b.col - a.col));
  }
  return std::max(1, static_cast<int>(std::ceil(longest / max_spacing)));
}

BinaryMask rasterize_filled(std::span<const PointF> curve, int width, int height) {
  if (curve.size() < 4) {
    throw Error(ErrorKind::InvalidPolygon, "curve has too few samples to enclose area");
  }
  const PointF& first = curve.front();
  const PointF& last = curve.back();
  if (std::abs(first.row - last.row) > 1e-9 || std::abs(first.col - last.col) > 1e-9) {
    throw Error(ErrorKind::InvalidPolygon, "curve is not closed");
  }

  double twice_area = 0.0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    twice_area += curve[i].col * curve[i + 1].row - curve[i + 1].col * curve[i].row;
  }
  if (std::abs(twice_area) < 1.0) {
    throw Error(ErrorKind::InvalidPolygon, "curve encloses no area (collinear border)");
  }

  // Work on a grid padded by one pixel so the exterior is always connected.
  const int pw = width + 2;
  const int ph = height + 2;
  std::vector<std::uint8_t> grid(static_cast<std::size_t>(pw) * ph, 0);
  constexpr std::uint8_t kCurve = 1;
  constexpr std::uint8_t kOutside = 2;

  std::vector<PixelCoord> rounded;
  rounded.reserve(curve.size());
  for (const PointF& p : curve) {
    const long r = std::lround(p.row);
    const long c = std::lround(p.col);
    if (r < 0 || c < 0 || r >= height || c >= width) {
      throw Error(ErrorKind::InvalidPolygon,
                  "curve leaves the " + std::to_string(width) + "x" +
                      std::to_string(height) + " image at (" + std::to_string(r) + ", " +
                      std::to_string(c) + ")");
    }
    rounded.push_back({static_cast<int>(r), static_cast<int>(c)});
  }
  for (std::size_t i = 0; i + 1 < rounded.size(); ++i) {
    draw_line(rounded[i].row, rounded[i].col, rounded[i + 1].row, rounded[i + 1].col,
              [&](int r, int c) {
                grid[static_cast<std::size_t>(r + 1) * pw + (c + 1)] = kCurve;
              });
  }

  // 4-connected flood fill of the exterior; an 8-connected loop stops it.
  std::vector<std::size_t> stack{0};
  grid[0] = kOutside;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const int r = static_cast<int>(i / pw);
    const int c = static_cast<int>(i % pw);
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      const int nr = r + dr[k];
      const int nc = c + dc[k];
      if (nr < 0 || nc < 0 || nr >= ph || nc >= pw) continue;
      const std::size_t j = static_cast<std::size_t>(nr) * pw + nc;
      if (grid[j] == 0) {
        grid[j] = kOutside;
        stack.push_back(j);
      }
    }
  }

  BinaryMask mask(width, height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (grid[static_cast<std::size_t>(r + 1) * pw + (c + 1)] != kOutside) mask.set(r, c);
    }
  }
  return mask;
}

BinaryMask border_mask(const ControlPolygon& poly, int width, int height) {
  const auto curve = spline_close(poly, auto_samples_per_segment(poly));
  return rasterize_filled(curve, width, height);
}

DistanceField distance_field(const BinaryMask& mask) {
  if (mask.empty()) {
    throw Error(ErrorKind::EmptyMask, "distance field needs at least one foreground pixel");
  }
  const int w = mask.width();
  const int h = mask.height();
  const int longest = std::max(w, h);
  std::vector<int> v(longest);
  std::vector<double> z(longest + 1);
  std::vector<std::int64_t> f(longest);
  std::vector<std::int64_t> d(longest);

  std::vector<std::int64_t> out(static_cast<std::size_t>(w) * h);
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) f[r] = mask.test(r, c) ? 0 : kUnreachable;
    edt_1d(std::span(f).first(h), std::span(d).first(h), v, z);
    for (int r = 0; r < h; ++r) out[static_cast<std::size_t>(r) * w + c] = d[r];
  }
  for (int r = 0; r < h; ++r) {
    std::int64_t* row = out.data() + static_cast<std::size_t>(r) * w;
    std::copy(row, row + w, f.begin());
    edt_1d(std::span(f).first(w), std::span(d).first(w), v, z);
    std::copy(d.begin(), d.begin() + w, row);
  }
  return DistanceField(w, h, std::move(out));
}

OuterRings outer_rings(const BinaryMask& lesion, double skip_fraction,
                       double take_fraction) {
  if (!(skip_fraction >= 0.0) || !(take_fraction > 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "ring fractions must satisfy skip >= 0 and take > 0");
  }
  const std::size_t area = lesion.count();
  if (area == 0) throw Error(ErrorKind::EmptyMask, "lesion mask is empty");

  const DistanceField field = distance_field(lesion);
  const auto squared = field.squared();
  std::vector<std::pair<std::int64_t, std::size_t>> ranked;
  ranked.reserve(lesion.pixel_count() - area);
  for (std::size_t i = 0; i < squared.size(); ++i) {
    if (!lesion.test_index(i)) ranked.emplace_back(squared[i], i);
  }

  const std::size_t want_skip = quota(skip_fraction, area);
  const std::size_t want_take = quota(take_fraction, area);
  const std::size_t wanted = want_skip + want_take;
  const std::size_t used = std::min(wanted, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(used),
                    ranked.end());

  OuterRings rings{BinaryMask(lesion.width(), lesion.height()),
                   BinaryMask(lesion.width(), lesion.height()), wanted > ranked.size()};
  for (std::size_t k = 0; k < used; ++k) {
    if (k < want_skip) {
      rings.skip.set_index(ranked[k].second);
    } else {
      rings.sample.set_index(ranked[k].second);
    }
  }
  return rings;
}

BinaryMask majority_filter(const BinaryMask& mask, int window) {
  if (window < 3 || window % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument,
                "majority window must be odd and >= 3, got " + std::to_string(window));
  }
  const int w = mask.width();
  const int h = mask.height();
  const int half = window / 2;
  const int pw = w + 2 * half;
  const int ph = h + 2 * half;

  // Integral image over the edge-replicated mask.
  std::vector<int> sum(static_cast<std::size_t>(pw + 1) * (ph + 1), 0);
  auto at = [&](int r, int c) -> int& { return sum[static_cast<std::size_t>(r) * (pw + 1) + c]; };
  for (int r = 0; r < ph; ++r) {
    const int sr = std::clamp(r - half, 0, h - 1);
    int running = 0;
    for (int c = 0; c < pw; ++c) {
      const int sc = std::clamp(c - half, 0, w - 1);
      running += mask.test(sr, sc) ? 1 : 0;
      at(r + 1, c + 1) = at(r, c + 1) + running;
    }
  }

  const int needed = (window * window + 1) / 2;
  BinaryMask out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int votes = at(r + window, c + window) - at(r, c + window) -
                        at(r + window, c) + at(r, c);
      if (votes >= needed) out.set(r, c);
    }
  }
  return out;
}

std::vector<PixelCoord> boundary_pixels(const BinaryMask& mask) {
  std::vector<PixelCoord> out;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.test(r, c)) continue;
      const bool inner = mask.contains(r - 1, c) && mask.test(r - 1, c) &&
                         mask.contains(r + 1, c) && mask.test(r + 1, c) &&
                         mask.contains(r, c - 1) && mask.test(r, c - 1) &&
                         mask.contains(r, c + 1) && mask.test(r, c + 1);
      if (!inner) out.push_back({r, c});
    }
  }
  if (out.empty()) throw Error(ErrorKind::EmptyMask, "mask has no foreground pixels");
  return out;
}

}  // namespace dermveil
