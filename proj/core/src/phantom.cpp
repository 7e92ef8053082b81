#include "dermveil/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dermveil/error.hpp"
#include "dermveil/raster.hpp"
#include "dermveil/rng.hpp"

namespace dermveil {
namespace {

constexpr double kNonVeilRadius = 8.0;

std::uint8_t noisy(std::uint8_t base, double sigma, Rng& rng) {
  const double v = base + (sigma > 0.0 ? sigma * rng.normal() : 0.0);
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Pick a uniformly random pixel among those satisfying `ok`, in row-major
// enumeration order.
template <typename Pred>
std::optional<PixelCoord> pick(int width, int height, Rng& rng, Pred&& ok) {
  std::vector<PixelCoord> pool;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (ok(r, c)) pool.push_back({r, c});
    }
  }
  if (pool.empty()) return std::nullopt;
  return pool[rng.below(pool.size())];
}

}  // namespace

PhantomShape parse_phantom_shape(std::string_view text) {
  if (text == "disk") return PhantomShape::Disk;
  if (text == "ellipse") return PhantomShape::Ellipse;
  if (text == "irregular") return PhantomShape::Irregular;
  throw Error(ErrorKind::InvalidArgument,
              "shape: expected disk, ellipse or irregular, got '" + std::string(text) + "'");
}

std::string_view to_string(PhantomShape shape) {
  switch (shape) {
    case PhantomShape::Disk: return "disk";
    case PhantomShape::Ellipse: return "ellipse";
    case PhantomShape::Irregular: return "irregular";
  }
  return "ellipse";
}

Phantom generate_phantom(const PhantomSpec& spec, std::uint64_t seed) {
  if (spec.border_points < 3) throw Error(ErrorKind::InvalidArgument, "border_points must be >= 3");
  if (!(spec.veil_fraction >= 0.0 && spec.veil_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "veil_fraction must lie in [0, 1)");
  }
  if (!(spec.semi_major > 2.0) || !(spec.semi_minor > 2.0)) {
    throw Error(ErrorKind::InvalidArgument, "lesion axes must exceed 2 pixels");
  }
  Rng rng(seed);
  const double pi = std::numbers::pi;

  const double rotation = rng.uniform(0.0, pi);
  const double center_row = spec.height / 2.0 + rng.uniform(-4.0, 4.0);
  const double center_col = spec.width / 2.0 + rng.uniform(-4.0, 4.0);
  const double phase3 = rng.uniform(0.0, 2.0 * pi);
  const double phase5 = rng.uniform(0.0, 2.0 * pi);

  std::vector<PointF> border;
  for (int k = 0; k < spec.border_points; ++k) {
    const double t = 2.0 * pi * k / spec.border_points;
    double x = 0.0, y = 0.0;
    switch (spec.shape) {
      case PhantomShape::Disk:
        x = spec.semi_major * std::cos(t);
        y = spec.semi_major * std::sin(t);
        break;
      case PhantomShape::Ellipse:
        x = spec.semi_major * std::cos(t);
        y = spec.semi_minor * std::sin(t);
        break;
      case PhantomShape::Irregular: {
        const double r = spec.semi_major *
                         (1.0 + 0.28 * std::sin(3.0 * t + phase3) + 0.12 * std::sin(5.0 * t + phase5));
        x = r * std::cos(t);
        y = r * std::sin(t);
        break;
      }
    }
    const double col = center_col + x * std::cos(rotation) - y * std::sin(rotation);
    const double row = center_row + x * std::sin(rotation) + y * std::cos(rotation);
    if (row < 1.0 || col < 1.0 || row > spec.height - 2.0 || col > spec.width - 2.0) {
      throw Error(ErrorKind::Degenerate, "phantom lesion does not fit the image");
    }
    border.push_back({row, col});
  }
  ControlPolygon polygon(border);
  BinaryMask lesion = border_mask(polygon, spec.width, spec.height);
  const double lesion_area = static_cast<double>(lesion.count());

  // Distance of each lesion pixel to the nearest background pixel.
  const DistanceField inner = distance_field(~lesion);

  BinaryMask veil(spec.width, spec.height);
  RegionAnnotation regions;
  std::optional<PixelCoord> veil_center;
  double veil_radius = 0.0;
  if (spec.veil_fraction > 0.0) {
    veil_radius = std::sqrt(spec.veil_fraction * lesion_area / pi);
    const double need = veil_radius + 2.0;
    veil_center = pick(spec.width, spec.height, rng, [&](int r, int c) {
      return lesion.test(r, c) && inner.at(r, c) >= need;
    });
    if (!veil_center) throw Error(ErrorKind::Degenerate, "veil disk does not fit inside the lesion");
    for (int r = 0; r < spec.height; ++r) {
      for (int c = 0; c < spec.width; ++c) {
        const double dr = r - veil_center->row;
        const double dc = c - veil_center->col;
        if (dr * dr + dc * dc <= veil_radius * veil_radius && lesion.test(r, c)) veil.set(r, c);
      }
    }
    const double circle_radius = std::max(1.0, veil_radius - 2.0);
    regions.circles.push_back({static_cast<double>(veil_center->row),
                               static_cast<double>(veil_center->col), circle_radius,
                               RegionLabel::Veil});
  }

  const double clear = kNonVeilRadius + 3.0;
  const auto non_veil_center = pick(spec.width, spec.height, rng, [&](int r, int c) {
    if (!lesion.test(r, c) || inner.at(r, c) < clear) return false;
    if (!veil_center) return true;
    return std::hypot(r - veil_center->row, c - veil_center->col) >= veil_radius + clear + 2.0;
  });
  if (non_veil_center) {
    regions.circles.push_back({static_cast<double>(non_veil_center->row),
                               static_cast<double>(non_veil_center->col), kNonVeilRadius,
                               RegionLabel::NonVeil});
  }

  RgbImage image(spec.width, spec.height);
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      const Rgb base = veil.test(r, c) ? spec.veil : lesion.test(r, c) ? spec.lesion : spec.skin;
      image.at(r, c) = {noisy(base.r, spec.noise_sigma, rng), noisy(base.g, spec.noise_sigma, rng),
                        noisy(base.b, spec.noise_sigma, rng)};
    }
  }

  LesionRecord record;
  record.image_id = spec.image_id;
  record.diagnosis = spec.diagnosis;
  record.has_veil_area = spec.veil_fraction > 0.0;
  Annotation annotation{std::move(polygon), std::move(regions), std::move(record),
                        ImageSize{spec.width, spec.height}};
  return Phantom{std::move(image), std::move(annotation), std::move(lesion), std::move(veil)};
}

}  // namespace dermveil
