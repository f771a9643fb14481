#include "ganaudit/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "ganaudit/errors.hpp"

namespace ganaudit {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

GrayImage read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw LoadError("cannot open image: " + path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw LoadError("libpng init failed for " + path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("corrupt png: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray(png, 1, -1, -1);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  GrayImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.pixels.resize(static_cast<size_t>(w) * h);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y)
    rows[y] = img.pixels.data() + static_cast<size_t>(y) * w;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const std::string& path, const GrayImage& img) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw LoadError("cannot write image: " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw LoadError("libpng init failed for " + path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw LoadError("png write failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_const_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y)
    rows[y] = img.pixels.data() + static_cast<size_t>(y) * img.width;
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open image: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw FormatError("expected binary PGM (P5): " + path);
  auto next_int = [&](const char* what) {
    // Skip whitespace and '#' comment lines between header tokens.
    int c = in.peek();
    while (c == '#' || std::isspace(c)) {
      if (c == '#') in.ignore(1 << 16, '\n');
      else in.ignore(1);
      c = in.peek();
    }
    long v = -1;
    in >> v;
    if (!in || v < 0)
      throw FormatError(std::string("bad PGM ") + what + ": " + path);
    return v;
  };
  long w = next_int("width");
  long h = next_int("height");
  long maxval = next_int("maxval");
  if (maxval != 255) throw FormatError("only 8-bit PGM supported: " + path);
  in.ignore(1);  // single whitespace before raster
  GrayImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.pixels.resize(static_cast<size_t>(w) * h);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw FormatError("truncated PGM raster: " + path);
  return img;
}

void write_pgm(const std::string& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write image: " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw LoadError("short write: " + path);
}

}  // namespace

GrayImage read_gray_image(const std::string& path) {
  if (ends_with(path, ".png")) return read_png(path);
  if (ends_with(path, ".pgm")) return read_pgm(path);
  throw FormatError("unsupported image extension: " + path);
}

void write_gray_image(const std::string& path, const GrayImage& img) {
  if (ends_with(path, ".png")) {
    write_png(path, img);
  } else if (ends_with(path, ".pgm")) {
    write_pgm(path, img);
  } else {
    throw FormatError("unsupported image extension: " + path);
  }
}

std::vector<float> to_unit_range(const GrayImage& img) {
  std::vector<float> out(img.pixels.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<float>(img.pixels[i]) / 127.5f - 1.0f;
  return out;
}

GrayImage from_unit_range(const std::vector<float>& values, int width,
                          int height) {
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    float v = std::clamp(values[i], -1.0f, 1.0f);
    img.pixels[i] = static_cast<uint8_t>(std::lround((v + 1.0f) * 127.5f));
  }
  return img;
}

GrayImage resample(const GrayImage& img, int out_w, int out_h) {
  GrayImage out;
  out.width = out_w;
  out.height = out_h;
  out.pixels.resize(static_cast<size_t>(out_w) * out_h);
  for (int y = 0; y < out_h; ++y) {
    float sy = (y + 0.5f) * img.height / out_h - 0.5f;
    int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, img.height - 1);
    int y1 = std::min(y0 + 1, img.height - 1);
    float fy = std::clamp(sy - y0, 0.0f, 1.0f);
    for (int x = 0; x < out_w; ++x) {
      float sx = (x + 0.5f) * img.width / out_w - 0.5f;
      int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, img.width - 1);
      int x1 = std::min(x0 + 1, img.width - 1);
      float fx = std::clamp(sx - x0, 0.0f, 1.0f);
      auto px = [&](int yy, int xx) {
        return static_cast<float>(
            img.pixels[static_cast<size_t>(yy) * img.width + xx]);
      };
      float v = (1 - fy) * ((1 - fx) * px(y0, x0) + fx * px(y0, x1)) +
                fy * ((1 - fx) * px(y1, x0) + fx * px(y1, x1));
      out.pixels[static_cast<size_t>(y) * out_w + x] =
          static_cast<uint8_t>(std::lround(std::clamp(v, 0.0f, 255.0f)));
    }
  }
  return out;
}

}  // namespace ganaudit
