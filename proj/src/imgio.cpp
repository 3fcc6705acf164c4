#include "bcosfire/imgio.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "bcosfire/error.hpp"

namespace bcosfire {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return data;
}

// Netpbm header tokenizer: whitespace separated, '#' starts a comment that
// runs to end of line.
class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  long next_int(const char* what) {
    skip_space_and_comments();
    std::size_t start = pos_;
    while (pos_ < bytes_.size() &&
           std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) {
      throw FormatError(std::string("PGM: expected ") + what);
    }
    if (pos_ - start > 9) throw FormatError(std::string("PGM: ") + what + " too large");
    return std::stol(std::string(bytes_.substr(start, pos_ - start)));
  }

  // After maxval exactly one whitespace byte separates header from raster.
  void consume_single_space() {
    if (pos_ >= bytes_.size() ||
        !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw FormatError("PGM: missing whitespace after maxval");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

bool has_png_signature(std::string_view bytes) {
  return bytes.size() >= 8 &&
         png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0;
}

GrayImage decode_png(std::string_view bytes, ChannelPolicy channel) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError(std::string("PNG: ") + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw FormatError("PNG: only 8-bit images are supported");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("PNG: " + msg);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  std::vector<double> px(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < px.size(); ++i) {
    const png_byte* p = &buf[i * channels];
    double v;
    if (!color) {
      v = p[0];
    } else {
      switch (channel) {
        case ChannelPolicy::Red: v = p[0]; break;
        case ChannelPolicy::Green: v = p[1]; break;
        case ChannelPolicy::Blue: v = p[2]; break;
        case ChannelPolicy::Luma:
        default: v = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]; break;
      }
    }
    px[i] = v / 255.0;
  }
  return GrayImage(w, h, std::move(px));
}

}  // namespace

ChannelPolicy parse_channel_policy(std::string_view name) {
  if (name == "green") return ChannelPolicy::Green;
  if (name == "luma") return ChannelPolicy::Luma;
  if (name == "red") return ChannelPolicy::Red;
  if (name == "blue") return ChannelPolicy::Blue;
  throw ParameterError("unknown channel policy '" + std::string(name) + "'");
}

GrayImage decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw FormatError("PGM: bad magic (expected P2 or P5)");
  }
  const bool ascii = bytes[1] == '2';
  HeaderReader hdr(bytes.substr(2));
  const long w = hdr.next_int("width");
  const long h = hdr.next_int("height");
  const long maxval = hdr.next_int("maxval");
  if (w <= 0 || h <= 0) throw FormatError("PGM: zero dimension");
  if (maxval <= 0 || maxval > 65535) {
    throw FormatError("PGM: unsupported maxval " + std::to_string(maxval));
  }
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<double> px(n);
  const double scale = static_cast<double>(maxval);

  if (ascii) {
    HeaderReader body(bytes.substr(2));
    // Re-walk the header tokens so the body reader starts after maxval.
    body.next_int("width");
    body.next_int("height");
    body.next_int("maxval");
    for (std::size_t i = 0; i < n; ++i) {
      long v;
      try {
        v = body.next_int("pixel value");
      } catch (const FormatError&) {
        throw FormatError("PGM: truncated body (" + std::to_string(i) + " of " +
                          std::to_string(n) + " samples)");
      }
      if (v > maxval) throw FormatError("PGM: sample exceeds maxval");
      px[i] = static_cast<double>(v) / scale;
    }
  } else {
    hdr.consume_single_space();
    const std::size_t start = 2 + hdr.pos();
    const std::size_t bps = maxval < 256 ? 1 : 2;
    if (bytes.size() - start < n * bps) {
      throw FormatError("PGM: truncated body (" +
                        std::to_string((bytes.size() - start) / bps) + " of " +
                        std::to_string(n) + " samples)");
    }
    const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + start);
    for (std::size_t i = 0; i < n; ++i) {
      long v = bps == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
      if (v > maxval) throw FormatError("PGM: sample exceeds maxval");
      px[i] = static_cast<double>(v) / scale;
    }
  }
  return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

std::uint8_t quantize(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5));
}

std::string encode_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width()) + " " +
                    std::to_string(img.height()) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + img.size());
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    out[header + i] = static_cast<char>(quantize(px[i]));
  }
  return out;
}

GrayImage load_image(const fs::path& path, ChannelPolicy channel) {
  const std::string bytes = read_file(path);
  try {
    if (has_png_signature(bytes)) return decode_png(bytes, channel);
    return decode_pgm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_image(const GrayImage& img, const fs::path& path) {
  const std::string bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

BinaryMask load_mask(const fs::path& path) {
  const GrayImage img = load_image(path, ChannelPolicy::Luma);
  BinaryMask mask(img.width(), img.height());
  auto px = img.pixels();
  auto bits = mask.bits();
  for (std::size_t i = 0; i < px.size(); ++i) bits[i] = px[i] > 0.5 ? 1 : 0;
  return mask;
}

void save_mask(const BinaryMask& mask, const fs::path& path) {
  GrayImage img(mask.width(), mask.height());
  auto bits = mask.bits();
  auto px = img.pixels();
  for (std::size_t i = 0; i < bits.size(); ++i) px[i] = bits[i] ? 1.0 : 0.0;
  save_image(img, path);
}

GrayImage invert(const GrayImage& img) {
  GrayImage out = img;
  for (double& v : out.pixels()) v = 1.0 - v;
  return out;
}

}  // namespace bcosfire
