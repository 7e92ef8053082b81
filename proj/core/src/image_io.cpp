#include "dermveil/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "dermveil/error.hpp"

namespace dermveil {
namespace {

struct Raster8 {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3
  std::vector<std::uint8_t> data;
};

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext;
}

bool is_png(std::string_view bytes) {
  return bytes.size() >= 8 &&
         png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0;
}

// --- PNM --------------------------------------------------------------------

class PnmReader {
 public:
  explicit PnmReader(std::string_view bytes) : bytes_(bytes) {}

  int next_int(const std::string& what) {
    skip_space_and_comments();
    std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw Error(ErrorKind::Parse, "PNM header: expected " + what);
    return std::stoi(std::string(bytes_.substr(start, pos_ - start)));
  }

  std::string_view payload() {
    // Exactly one whitespace byte separates the header from the raster.
    if (pos_ >= bytes_.size()) throw Error(ErrorKind::Parse, "PNM: missing raster data");
    return bytes_.substr(pos_ + 1);
  }

  void skip(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

Raster8 decode_pnm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(ErrorKind::Parse, "unsupported image format (expected PNG, P5 or P6)");
  }
  Raster8 out;
  out.channels = bytes[1] == '6' ? 3 : 1;
  PnmReader reader(bytes);
  reader.skip(2);
  out.width = reader.next_int("width");
  out.height = reader.next_int("height");
  const int maxval = reader.next_int("maxval");
  if (out.width < 1 || out.height < 1) throw Error(ErrorKind::Parse, "PNM: empty image");
  if (maxval < 1 || maxval > 255) throw Error(ErrorKind::Parse, "PNM: only 8-bit maxval supported");
  const std::string_view raster = reader.payload();
  const std::size_t need = static_cast<std::size_t>(out.width) * out.height * out.channels;
  if (raster.size() < need) throw Error(ErrorKind::Parse, "PNM: truncated raster");
  out.data.assign(raster.begin(), raster.begin() + static_cast<std::ptrdiff_t>(need));
  if (maxval != 255) {
    for (auto& v : out.data) v = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  }
  return out;
}

std::string encode_pnm(const Raster8& raster) {
  std::ostringstream os;
  os << (raster.channels == 3 ? "P6" : "P5") << '\n'
     << raster.width << ' ' << raster.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(raster.data.data()),
           static_cast<std::streamsize>(raster.data.size()));
  return os.str();
}

// --- PNG --------------------------------------------------------------------

struct PngReadState {
  std::string_view bytes;
  std::size_t pos = 0;
};

struct PngErrorState {
  char message[256] = "unknown error";
};

void png_fail(png_structp png, png_const_charp message) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", message);
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

void png_read_bytes(png_structp png, png_bytep out, png_size_t n) {
  auto* s = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (s->pos + n > s->bytes.size()) png_error(png, "truncated stream");
  std::memcpy(out, s->bytes.data() + s->pos, n);
  s->pos += n;
}

void png_write_bytes(png_structp png, png_bytep data, png_size_t n) {
  static_cast<std::string*>(png_get_io_ptr(png))->append(reinterpret_cast<const char*>(data), n);
}

void png_flush_noop(png_structp) {}

// libpng reports errors by longjmp; everything it can unwind past is owned
// by the caller, so no destructors are skipped.
bool decode_png_raw(PngReadState* input, Raster8* out, std::vector<png_bytep>* rows,
                    PngErrorState* err) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, err, png_fail, png_warn);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, input, png_read_bytes);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  out->width = static_cast<int>(png_get_image_width(png, info));
  out->height = static_cast<int>(png_get_image_height(png, info));
  out->channels = png_get_channels(png, info);
  if (out->channels != 1 && out->channels != 3) {
    png_error(png, "unsupported channel layout");
  }
  const std::size_t stride = png_get_rowbytes(png, info);
  out->data.resize(stride * out->height);
  rows->resize(out->height);
  for (int r = 0; r < out->height; ++r) (*rows)[r] = out->data.data() + stride * r;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode_png_raw(const Raster8* raster, std::string* out, PngErrorState* err) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, err, png_fail, png_warn);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, out, png_write_bytes, png_flush_noop);
  png_set_IHDR(png, info, raster->width, raster->height, 8,
               raster->channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(raster->width) * raster->channels;
  for (int r = 0; r < raster->height; ++r) {
    png_write_row(png, const_cast<png_bytep>(raster->data.data() + stride * r));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

Raster8 decode_png(std::string_view bytes) {
  PngReadState input{bytes, 0};
  Raster8 out;
  std::vector<png_bytep> rows;
  PngErrorState err;
  if (!decode_png_raw(&input, &out, &rows, &err)) {
    throw Error(ErrorKind::Parse, std::string("PNG: ") + err.message);
  }
  return out;
}

std::string encode_png(const Raster8& raster) {
  std::string out;
  PngErrorState err;
  if (!encode_png_raw(&raster, &out, &err)) {
    throw Error(ErrorKind::Io, std::string("PNG: ") + err.message);
  }
  return out;
}

Raster8 decode(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return is_png(bytes) ? decode_png(bytes) : decode_pnm(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string encode(const std::filesystem::path& path, const Raster8& raster) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return encode_png(raster);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return encode_pnm(raster);
  throw Error(ErrorKind::InvalidArgument,
              "unsupported output extension '" + ext + "' (use .png, .ppm or .pgm)");
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot rename onto " + path.string());
  }
}

RgbImage read_image(const std::filesystem::path& path) {
  const Raster8 raster = decode(path);
  std::vector<Rgb> pixels(static_cast<std::size_t>(raster.width) * raster.height);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (raster.channels == 3) {
      pixels[i] = {raster.data[3 * i], raster.data[3 * i + 1], raster.data[3 * i + 2]};
    } else {
      pixels[i] = {raster.data[i], raster.data[i], raster.data[i]};
    }
  }
  return RgbImage(raster.width, raster.height, std::move(pixels));
}

void write_image(const std::filesystem::path& path, const RgbImage& image) {
  Raster8 raster{image.width(), image.height(), 3, {}};
  raster.data.reserve(image.pixel_count() * 3);
  for (const Rgb& p : image.pixels()) {
    raster.data.push_back(p.r);
    raster.data.push_back(p.g);
    raster.data.push_back(p.b);
  }
  write_file_atomic(path, encode(path, raster));
}

BinaryMask read_mask(const std::filesystem::path& path) {
  const Raster8 raster = decode(path);
  BinaryMask mask(raster.width, raster.height);
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
    mask.set_index(i, raster.data[i * raster.channels] >= 128);
  }
  return mask;
}

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  Raster8 raster{mask.width(), mask.height(), 1, {}};
  raster.data.resize(mask.pixel_count());
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
    raster.data[i] = mask.test_index(i) ? 255 : 0;
  }
  std::filesystem::path out = path;
  write_file_atomic(out, encode(out, raster));
}

}  // namespace dermveil
