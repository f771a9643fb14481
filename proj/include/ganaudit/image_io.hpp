#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ganaudit {

// 8-bit grayscale image buffer used at the file boundary. Pixel math inside
// the toolkit happens on [-1, 1] floats; conversion is centralized here.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // row-major
};

GrayImage read_gray_image(const std::string& path);
void write_gray_image(const std::string& path, const GrayImage& img);

// [0,255] -> [-1,1] and back (rounding to nearest, clamped).
std::vector<float> to_unit_range(const GrayImage& img);
GrayImage from_unit_range(const std::vector<float>& values, int width,
                          int height);

// Bilinear resample, used when a corpus image is not square.
GrayImage resample(const GrayImage& img, int out_w, int out_h);

}  // namespace ganaudit
