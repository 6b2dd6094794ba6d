#include "cubecolor/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "cubecolor/errors.hpp"

namespace cubecolor {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

// Skips whitespace and '#' comments between PPM header tokens.
void skip_ppm_space(std::istream& in) {
  for (;;) {
    const int ch = in.peek();
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') {
      in.get();
    } else {
      return;
    }
  }
}

RgbImage read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingImage("cannot open image " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw IoError(path + ": not a binary PPM (P6)");
  int width = 0, height = 0, maxval = 0;
  skip_ppm_space(in);
  in >> width;
  skip_ppm_space(in);
  in >> height;
  skip_ppm_space(in);
  in >> maxval;
  if (!in || width <= 0 || height <= 0 || maxval != 255) {
    throw IoError(path + ": unsupported PPM header (need positive size, maxval 255)");
  }
  in.get();
  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * height * 3);
  in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (in.gcount() != static_cast<std::streamsize>(px.size())) {
    throw IoError(path + ": truncated PPM pixel data");
  }
  return RgbImage(width, height, std::move(px));
}

RgbImage read_png(const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError(path + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> px(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, px.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError(path + ": " + msg);
  }
  return RgbImage(static_cast<int>(image.width), static_cast<int>(image.height), std::move(px));
}

}  // namespace

RgbImage read_image(const std::string& path) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw MissingImage("cannot open image " + path);
  unsigned char sig[8] = {};
  const auto n = std::fread(sig, 1, sizeof sig, f.get());
  f.reset();
  if (n == sizeof sig && png_sig_cmp(sig, 0, sizeof sig) == 0) return read_png(path);
  if (n >= 2 && sig[0] == 'P' && sig[1] == '6') return read_ppm(path);
  throw IoError(path + ": unrecognized image format (expected PNG or P6 PPM)");
}

void write_ppm(const RgbImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image " + path);
  out << "P6\n" << image.width() << " " << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data().data()),
            static_cast<std::streamsize>(image.data().size()));
  if (!out) throw IoError("failed writing image " + path);
}

void write_png(const RgbImage& image, const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.data().data(), 0, nullptr)) {
    throw IoError(path + ": " + png.message);
  }
}

}  // namespace cubecolor
