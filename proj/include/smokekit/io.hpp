#ifndef SMOKEKIT_IO_HPP
#define SMOKEKIT_IO_HPP

// PNG and JPEG codecs over libpng / libjpeg. 8-bit samples decode to v/255
// and encode as round(v * 255) after clamping; 16-bit PNG uses 65535.

#include <png.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

// jpeglib.h needs size_t and FILE declared first.
#include <jpeglib.h>

#include "smokekit/error.hpp"
#include "smokekit/harmonize.hpp"
#include "smokekit/image.hpp"

namespace smokekit::io {

namespace fs = std::filesystem;

using Bytes = std::vector<unsigned char>;

inline Bytes read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Writes to a sibling temporary file and renames it over `path`.
inline void write_file_atomic(const fs::path &path, const Bytes &bytes) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot write '" + tmp.string() + "'");
    }
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw IoError("short write to '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

inline void write_text_atomic(const fs::path &path, const std::string &text) {
  write_file_atomic(path, Bytes(text.begin(), text.end()));
}

inline std::uint8_t quantize8(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

inline std::uint16_t quantize16(double v) {
  return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
}

enum class Format { png, jpeg, unknown };

inline Format sniff(const Bytes &b) {
  if (b.size() >= 8 && png_sig_cmp(b.data(), 0, 8) == 0) {
    return Format::png;
  }
  if (b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF) {
    return Format::jpeg;
  }
  return Format::unknown;
}

namespace detail {

struct MemReader {
  const Bytes *bytes;
  std::size_t pos;
};

inline void png_read_mem(png_structp png, png_bytep out, png_size_t len) {
  auto *r = static_cast<MemReader *>(png_get_io_ptr(png));
  if (r->pos + len > r->bytes->size()) {
    png_error(png, "truncated PNG");
  }
  std::copy_n(r->bytes->data() + r->pos, len, out);
  r->pos += len;
}

inline void png_write_mem(png_structp png, png_bytep data, png_size_t len) {
  auto *out = static_cast<Bytes *>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

inline void png_flush_noop(png_structp) {}

// Raw decode: samples normalized, native channel count (1 or 3), alpha stripped.
struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> interleaved;
};

inline bool png_header(const Bytes &bytes, png_uint_32 &w, png_uint_32 &h, int &channels, int &depth) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  MemReader reader{&bytes, 0};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &reader, png_read_mem);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  w = png_get_image_width(png, info);
  h = png_get_image_height(png, info);
  depth = png_get_bit_depth(png, info) == 16 ? 16 : 8;
  channels = (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) ? 1 : 3;
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

// `rows` must hold h * w * channels * depth/8 bytes.
inline bool png_body(const Bytes &bytes, unsigned char *rows, std::size_t row_bytes, png_uint_32 h) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  MemReader reader{&bytes, 0};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &reader, png_read_mem);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(png);
  }
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) {
    png_set_strip_alpha(png);
  }
  png_read_update_info(png, info);
  if (png_get_rowbytes(png, info) != row_bytes) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  for (png_uint_32 y = 0; y < h; ++y) {
    png_read_row(png, rows + y * row_bytes, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

inline Decoded decode_png(const Bytes &bytes, const std::string &name) {
  png_uint_32 w = 0, h = 0;
  int channels = 0, depth = 0;
  if (!png_header(bytes, w, h, channels, depth)) {
    throw IoError("'" + name + "': invalid PNG header");
  }
  const std::size_t bps = static_cast<std::size_t>(depth / 8);
  const std::size_t row_bytes = static_cast<std::size_t>(w) * channels * bps;
  std::vector<unsigned char> raw(row_bytes * h);
  if (!png_body(bytes, raw.data(), row_bytes, h)) {
    throw IoError("'" + name + "': corrupt PNG data");
  }
  Decoded d{static_cast<int>(w), static_cast<int>(h), channels, {}};
  const std::size_t n = static_cast<std::size_t>(w) * h * channels;
  d.interleaved.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.interleaved[i] = bps == 2 ? ((raw[2 * i] << 8) | raw[2 * i + 1]) / 65535.0 : raw[i] / 255.0;
  }
  return d;
}

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto *err = reinterpret_cast<JpegErrorMgr *>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

inline void jpeg_silence(j_common_ptr, int) {}

inline bool jpeg_header(const Bytes &bytes, int &w, int &h, int &channels, JpegErrorMgr &err) {
  jpeg_decompress_struct cinfo{};
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  err.pub.emit_message = jpeg_silence;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  w = static_cast<int>(cinfo.image_width);
  h = static_cast<int>(cinfo.image_height);
  channels = cinfo.jpeg_color_space == JCS_GRAYSCALE ? 1 : 3;
  jpeg_destroy_decompress(&cinfo);
  return true;
}

inline bool jpeg_body(const Bytes &bytes, unsigned char *pixels, int channels, JpegErrorMgr &err) {
  jpeg_decompress_struct cinfo{};
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  err.pub.emit_message = jpeg_silence;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_decompress(&cinfo);
  const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * channels;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

inline Decoded decode_jpeg(const Bytes &bytes, const std::string &name) {
  JpegErrorMgr err{};
  int w = 0, h = 0, channels = 0;
  if (!jpeg_header(bytes, w, h, channels, err)) {
    throw IoError("'" + name + "': invalid JPEG header: " + err.message);
  }
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * channels);
  if (!jpeg_body(bytes, raw.data(), channels, err)) {
    throw IoError("'" + name + "': corrupt JPEG data: " + err.message);
  }
  Decoded d{w, h, channels, {}};
  d.interleaved.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    d.interleaved[i] = raw[i] / 255.0;
  }
  return d;
}

inline Image to_image(const Decoded &d, int channels) {
  if (channels == 1 && d.channels != 1) {
    throw IoError("expected a single-channel image, got " + std::to_string(d.channels) + " channels");
  }
  Image img(d.width, d.height, channels);
  const std::size_t n = img.pixel_count();
  for (int c = 0; c < channels; ++c) {
    auto dst = img.plane(c);
    const int src_c = d.channels == 1 ? 0 : c;
    for (std::size_t i = 0; i < n; ++i) {
      dst[i] = d.interleaved[i * d.channels + src_c];
    }
  }
  return img;
}

} // namespace detail

/// Decodes PNG (8/16-bit, gray/RGB/palette, alpha dropped) or JPEG by
/// content. Gray files are replicated when `channels` is 3.
inline Image decode_image(const Bytes &bytes, const std::string &name = "<memory>", int channels = 3) {
  smokekit::detail::require(channels == 1 || channels == 3, "decode_image: channels must be 1 or 3");
  switch (sniff(bytes)) {
  case Format::png:
    return detail::to_image(detail::decode_png(bytes, name), channels);
  case Format::jpeg:
    return detail::to_image(detail::decode_jpeg(bytes, name), channels);
  case Format::unknown:
    break;
  }
  throw IoError("'" + name + "': not a PNG or JPEG file");
}

inline Image read_image(const fs::path &path, int channels = 3) {
  return decode_image(read_file(path), path.string(), channels);
}

namespace detail {

inline bool png_encode(Bytes &out, const unsigned char *rows, std::size_t row_bytes, png_uint_32 w, png_uint_32 h,
                       int color_type, int depth) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &out, png_write_mem, png_flush_noop);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, w, h, depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (png_uint_32 y = 0; y < h; ++y) {
    png_write_row(png, rows + y * row_bytes);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

} // namespace detail

/// 8-bit PNG (gray or RGB per the image's channel count), or 16-bit when
/// `sixteen_bit` is set.
inline Bytes encode_png(const Image &img, bool sixteen_bit = false) {
  smokekit::detail::require(!img.empty(), "encode_png: empty image");
  const int ch = img.channels();
  const std::size_t bps = sixteen_bit ? 2 : 1;
  const std::size_t row_bytes = static_cast<std::size_t>(img.width()) * ch * bps;
  std::vector<unsigned char> raw(row_bytes * img.height());
  std::size_t k = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < ch; ++c) {
        if (sixteen_bit) {
          const auto v = quantize16(img.at(x, y, c));
          raw[k++] = static_cast<unsigned char>(v >> 8);
          raw[k++] = static_cast<unsigned char>(v & 0xFF);
        } else {
          raw[k++] = quantize8(img.at(x, y, c));
        }
      }
    }
  }
  Bytes out;
  if (!detail::png_encode(out, raw.data(), row_bytes, static_cast<png_uint_32>(img.width()),
                          static_cast<png_uint_32>(img.height()), ch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                          sixteen_bit ? 16 : 8)) {
    throw IoError("PNG encoding failed");
  }
  return out;
}

inline void write_png(const fs::path &path, const Image &img, bool sixteen_bit = false) {
  write_file_atomic(path, encode_png(img, sixteen_bit));
}

struct JpegOptions {
  int quality = 95;
  ChromaSubsampling subsampling = ChromaSubsampling::s420;
};

namespace detail {

inline bool jpeg_encode(unsigned char **buf, unsigned long *len, const unsigned char *rgb, int w, int h,
                        const JpegOptions &opt, JpegErrorMgr &err) {
  jpeg_compress_struct cinfo{};
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  err.pub.emit_message = jpeg_silence;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, buf, len);
  cinfo.image_width = static_cast<JDIMENSION>(w);
  cinfo.image_height = static_cast<JDIMENSION>(h);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, opt.quality, TRUE);
  cinfo.dct_method = JDCT_ISLOW;
  cinfo.optimize_coding = FALSE;
  cinfo.restart_interval = 0;
  cinfo.restart_in_rows = 0;
  const int h_luma = opt.subsampling == ChromaSubsampling::s444 ? 1 : 2;
  const int v_luma = opt.subsampling == ChromaSubsampling::s420 ? 2 : 1;
  cinfo.comp_info[0].h_samp_factor = h_luma;
  cinfo.comp_info[0].v_samp_factor = v_luma;
  for (int c = 1; c < 3; ++c) {
    cinfo.comp_info[c].h_samp_factor = 1;
    cinfo.comp_info[c].v_samp_factor = 1;
  }
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(w) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<unsigned char *>(rgb + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

} // namespace detail

/// Baseline sequential JPEG: Huffman tables are the standard ones, no
/// progressive scans, no restart markers.
inline Bytes encode_jpeg(const Image &img, const JpegOptions &opt = {}) {
  smokekit::detail::require(img.channels() == 3, "encode_jpeg: needs a 3-channel image");
  smokekit::detail::require(!img.empty(), "encode_jpeg: empty image");
  smokekit::detail::require(opt.quality >= 1 && opt.quality <= 100, "encode_jpeg: quality must lie in [1, 100]");
  std::vector<unsigned char> rgb(img.pixel_count() * 3);
  std::size_t k = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        rgb[k++] = quantize8(img.at(x, y, c));
      }
    }
  }
  detail::JpegErrorMgr err{};
  unsigned char *buf = nullptr;
  unsigned long len = 0;
  const bool ok = detail::jpeg_encode(&buf, &len, rgb.data(), img.width(), img.height(), opt, err);
  Bytes out;
  if (ok) {
    out.assign(buf, buf + len);
  }
  std::free(buf);
  if (!ok) {
    throw IoError(std::string("JPEG encoding failed: ") + err.message);
  }
  return out;
}

inline void write_jpeg(const fs::path &path, const Image &img, const JpegOptions &opt = {}) {
  write_file_atomic(path, encode_jpeg(img, opt));
}

/// Frame and scan properties read straight from the JPEG marker stream.
struct JpegInfo {
  bool baseline = false;    ///< SOF0
  bool progressive = false; ///< SOF2 / SOF6 / SOF10 / SOF14
  int width = 0;
  int height = 0;
  int precision = 0;
  int restart_interval = 0;
  std::vector<std::pair<int, int>> sampling; ///< (h, v) per component
};

inline JpegInfo probe_jpeg(const Bytes &b) {
  if (sniff(b) != Format::jpeg) {
    throw IoError("probe_jpeg: not a JPEG stream");
  }
  JpegInfo info;
  bool have_frame = false;
  std::size_t i = 2;
  while (i + 4 <= b.size()) {
    if (b[i] != 0xFF) {
      throw IoError("probe_jpeg: marker expected at offset " + std::to_string(i));
    }
    const unsigned marker = b[i + 1];
    if (marker == 0xFF) {
      ++i;
      continue;
    }
    if (marker == 0xD9 || marker == 0xDA) {
      break;
    }
    const std::size_t len = (static_cast<std::size_t>(b[i + 2]) << 8) | b[i + 3];
    const std::size_t seg = i + 4;
    if (i + 2 + len > b.size()) {
      throw IoError("probe_jpeg: truncated segment");
    }
    const bool is_sof = marker >= 0xC0 && marker <= 0xCF && marker != 0xC4 && marker != 0xC8 && marker != 0xCC;
    if (is_sof) {
      have_frame = true;
      info.baseline = marker == 0xC0;
      info.progressive = marker == 0xC2 || marker == 0xC6 || marker == 0xCA || marker == 0xCE;
      info.precision = b[seg];
      info.height = (b[seg + 1] << 8) | b[seg + 2];
      info.width = (b[seg + 3] << 8) | b[seg + 4];
      const int nc = b[seg + 5];
      for (int c = 0; c < nc; ++c) {
        const unsigned char hv = b[seg + 6 + 3 * static_cast<std::size_t>(c) + 1];
        info.sampling.emplace_back(hv >> 4, hv & 0x0F);
      }
    } else if (marker == 0xDD) {
      info.restart_interval = (b[seg] << 8) | b[seg + 1];
    }
    i += 2 + len;
  }
  if (!have_frame) {
    throw IoError("probe_jpeg: no frame header");
  }
  return info;
}

inline bool has_image_extension(const fs::path &p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

/// Regular files with an image extension directly inside `dir`, sorted by path.
inline std::vector<fs::path> list_images(const fs::path &dir) {
  if (!fs::is_directory(dir)) {
    throw IoError("not a directory: '" + dir.string() + "'");
  }
  std::vector<fs::path> out;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && has_image_extension(entry.path())) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace smokekit::io

#endif // SMOKEKIT_IO_HPP
