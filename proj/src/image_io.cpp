#include "siftbench/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "siftbench/error.hpp"

namespace siftbench {

namespace {

inline uint8_t to_byte(float v) {
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

inline float from_byte(uint8_t v) { return static_cast<float>(v) / 255.0f; }

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  return f;
}

// ---- PNG ----

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriter() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

// Decodes to interleaved 8-bit RGB regardless of the source layout.
void read_png_rgb8(std::FILE* f, int& width, int& height, std::vector<uint8_t>& rgb) {
  PngReader ctx;
  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw CodecError("png: failed to create read struct");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw CodecError("png: failed to create info struct");
  if (setjmp(png_jmpbuf(ctx.png))) {
    throw CodecError("png: decode failed");
  }
  png_init_io(ctx.png, f);
  png_read_info(ctx.png, ctx.info);

  png_set_expand(ctx.png);
  png_set_strip_16(ctx.png);
  png_set_strip_alpha(ctx.png);
  png_set_gray_to_rgb(ctx.png);
  png_read_update_info(ctx.png, ctx.info);

  width = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
  height = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
  if (png_get_channels(ctx.png, ctx.info) != 3) {
    throw CodecError("png: unexpected channel count after expansion");
  }
  rgb.resize(static_cast<size_t>(width) * height * 3);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = rgb.data() + static_cast<size_t>(y) * width * 3;
  }
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);
}

void write_png_bytes(std::FILE* f, int width, int height, int channels,
                     const std::vector<uint8_t>& data) {
  PngWriter ctx;
  ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw CodecError("png: failed to create write struct");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw CodecError("png: failed to create info struct");
  if (setjmp(png_jmpbuf(ctx.png))) {
    throw CodecError("png: encode failed");
  }
  png_init_io(ctx.png, f);
  const int color = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(ctx.png, ctx.info, width, height, 8, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(data.data() + static_cast<size_t>(y) * width * channels);
  }
  png_write_image(ctx.png, rows.data());
  png_write_end(ctx.png, nullptr);
}

// ---- JPEG ----

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_trampoline(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

std::vector<uint8_t> encode_jpeg_gray(const Image& img, int quality) {
  jpeg_compress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_trampoline;

  unsigned char* buffer = nullptr;
  unsigned long buffer_size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    if (buffer) free(buffer);
    throw CodecError(std::string("jpeg encode failed: ") + err.message);
  }

  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &buffer_size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 1;
  cinfo.in_color_space = JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE /* force baseline */);
  jpeg_start_compress(&cinfo, TRUE);

  std::vector<uint8_t> row(img.width());
  while (cinfo.next_scanline < cinfo.image_height) {
    const float* src = img.row(static_cast<int>(cinfo.next_scanline));
    for (int x = 0; x < img.width(); ++x) row[x] = to_byte(src[x]);
    JSAMPROW rows[1] = {row.data()};
    jpeg_write_scanlines(&cinfo, rows, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  std::vector<uint8_t> out(buffer, buffer + buffer_size);
  free(buffer);
  return out;
}

// Decodes a JPEG byte stream to interleaved RGB8 (grayscale replicated).
void decode_jpeg_rgb8(const uint8_t* data, size_t size, int& width, int& height,
                      std::vector<uint8_t>& rgb) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_trampoline;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw CodecError(std::string("jpeg decode failed: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, const_cast<unsigned char*>(data), static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  rgb.resize(static_cast<size_t>(width) * height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW rows[1] = {rgb.data() + static_cast<size_t>(cinfo.output_scanline) * width * 3};
    jpeg_read_scanlines(&cinfo, rows, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
}

std::array<Image, 3> rgb8_to_planes(int width, int height, const std::vector<uint8_t>& rgb) {
  Image r(width, height), g(width, height), b(width, height);
  for (int y = 0; y < height; ++y) {
    const uint8_t* src = rgb.data() + static_cast<size_t>(y) * width * 3;
    float* pr = r.row(y);
    float* pg = g.row(y);
    float* pb = b.row(y);
    for (int x = 0; x < width; ++x) {
      pr[x] = from_byte(src[3 * x + 0]);
      pg[x] = from_byte(src[3 * x + 1]);
      pb[x] = from_byte(src[3 * x + 2]);
    }
  }
  return {std::move(r), std::move(g), std::move(b)};
}

bool has_png_magic(const uint8_t* data, size_t size) {
  static const uint8_t magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return size >= 8 && std::memcmp(data, magic, 8) == 0;
}

bool has_jpeg_magic(const uint8_t* data, size_t size) {
  return size >= 3 && data[0] == 0xff && data[1] == 0xd8 && data[2] == 0xff;
}

std::array<Image, 3> read_rgb_planes(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  uint8_t magic[8] = {};
  const size_t got = std::fread(magic, 1, sizeof(magic), f.get());
  std::rewind(f.get());

  int width = 0, height = 0;
  std::vector<uint8_t> rgb;
  if (has_png_magic(magic, got)) {
    read_png_rgb8(f.get(), width, height, rgb);
  } else if (has_jpeg_magic(magic, got)) {
    std::fseek(f.get(), 0, SEEK_END);
    const long size = std::ftell(f.get());
    std::rewind(f.get());
    std::vector<uint8_t> bytes(static_cast<size_t>(size));
    if (std::fread(bytes.data(), 1, bytes.size(), f.get()) != bytes.size()) {
      throw IoError("short read on '" + path.string() + "'");
    }
    decode_jpeg_rgb8(bytes.data(), bytes.size(), width, height, rgb);
  } else {
    throw CodecError("'" + path.string() + "' is neither PNG nor JPEG");
  }
  return rgb8_to_planes(width, height, rgb);
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  auto [r, g, b] = read_rgb_planes(path);
  return to_grayscale(r, g, b);
}

std::array<Image, 3> read_image_rgb(const std::filesystem::path& path) {
  return read_rgb_planes(path);
}

void write_png(const Image& img, const std::filesystem::path& path) {
  std::vector<uint8_t> data(static_cast<size_t>(img.width()) * img.height());
  for (int y = 0; y < img.height(); ++y) {
    const float* src = img.row(y);
    for (int x = 0; x < img.width(); ++x) {
      data[static_cast<size_t>(y) * img.width() + x] = to_byte(src[x]);
    }
  }
  FilePtr f = open_file(path, "wb");
  write_png_bytes(f.get(), img.width(), img.height(), 1, data);
}

void write_png_rgb(const Image& r, const Image& g, const Image& b,
                   const std::filesystem::path& path) {
  if (r.width() != g.width() || r.width() != b.width() ||
      r.height() != g.height() || r.height() != b.height()) {
    throw DimensionError("channel grids must share dimensions");
  }
  std::vector<uint8_t> data(static_cast<size_t>(r.width()) * r.height() * 3);
  for (int y = 0; y < r.height(); ++y) {
    const float* pr = r.row(y);
    const float* pg = g.row(y);
    const float* pb = b.row(y);
    uint8_t* dst = data.data() + static_cast<size_t>(y) * r.width() * 3;
    for (int x = 0; x < r.width(); ++x) {
      dst[3 * x + 0] = to_byte(pr[x]);
      dst[3 * x + 1] = to_byte(pg[x]);
      dst[3 * x + 2] = to_byte(pb[x]);
    }
  }
  FilePtr f = open_file(path, "wb");
  write_png_bytes(f.get(), r.width(), r.height(), 3, data);
}

void write_jpeg(const Image& img, const std::filesystem::path& path, int quality) {
  if (quality < 1 || quality > 100) {
    throw ParameterError("jpeg quality must be in 1..100");
  }
  const std::vector<uint8_t> bytes = encode_jpeg_gray(img, quality);
  FilePtr f = open_file(path, "wb");
  if (std::fwrite(bytes.data(), 1, bytes.size(), f.get()) != bytes.size()) {
    throw IoError("short write on '" + path.string() + "'");
  }
}

Image jpeg_roundtrip(const Image& img, int quality) {
  if (quality < 1 || quality > 100) {
    throw ParameterError("jpeg quality must be in 1..100");
  }
  const std::vector<uint8_t> bytes = encode_jpeg_gray(img, quality);
  int width = 0, height = 0;
  std::vector<uint8_t> rgb;
  decode_jpeg_rgb8(bytes.data(), bytes.size(), width, height, rgb);
  if (width != img.width() || height != img.height()) {
    throw CodecError("jpeg round trip changed dimensions");
  }
  // Grayscale in, so R == G == B after decode.
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    const uint8_t* src = rgb.data() + static_cast<size_t>(y) * width * 3;
    float* dst = out.row(y);
    for (int x = 0; x < width; ++x) dst[x] = from_byte(src[3 * x]);
  }
  return out;
}

void write_image(const Image& img, const std::filesystem::path& path, int jpeg_quality) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".png") {
    write_png(img, path);
  } else if (ext == ".jpg" || ext == ".jpeg") {
    write_jpeg(img, path, jpeg_quality);
  } else {
    throw ParameterError("unsupported image extension '" + ext + "' (use .png/.jpg)");
  }
}

}  // namespace siftbench
