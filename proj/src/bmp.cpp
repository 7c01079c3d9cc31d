#include <cstring>
#include <string>

#include <fmt/format.h>

#include "scriptid/error.hpp"
#include "scriptid/raster.hpp"

namespace scriptid {
namespace {

constexpr std::uint32_t kBiRgb = 0;
constexpr std::uint32_t kBiRle8 = 1;

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u8(std::size_t off) const {
    need(off, 1);
    return bytes_[off];
  }
  std::uint32_t u16(std::size_t off) const {
    need(off, 2);
    return bytes_[off] | (std::uint32_t{bytes_[off + 1]} << 8);
  }
  std::uint32_t u32(std::size_t off) const {
    need(off, 4);
    return bytes_[off] | (std::uint32_t{bytes_[off + 1]} << 8) | (std::uint32_t{bytes_[off + 2]} << 16) |
           (std::uint32_t{bytes_[off + 3]} << 24);
  }
  std::int32_t i32(std::size_t off) const { return static_cast<std::int32_t>(u32(off)); }

  void need(std::size_t off, std::size_t n) const {
    if (off > bytes_.size() || n > bytes_.size() - off) throw FormatError("BMP: truncated file");
  }
  std::size_t size() const { return bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
};

void put_u16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  put_u16(out, v & 0xFFFF);
  put_u16(out, v >> 16);
}

}  // namespace

RgbImage decode_bmp(std::span<const std::uint8_t> bytes) {
  const Reader rd(bytes);
  if (rd.u8(0) != 'B' || rd.u8(1) != 'M') throw FormatError("BMP: missing 'BM' signature");
  const std::size_t pixel_offset = rd.u32(10);
  const std::size_t dib_size = rd.u32(14);

  std::int64_t width = 0;
  std::int64_t height = 0;
  std::uint32_t bpp = 0;
  std::uint32_t compression = kBiRgb;
  std::uint32_t colors_used = 0;
  std::size_t palette_entry = 4;
  if (dib_size == 12) {
    width = rd.u16(18);
    height = rd.u16(20);
    bpp = rd.u16(24);
    palette_entry = 3;
  } else if (dib_size >= 40) {
    width = rd.i32(18);
    height = rd.i32(22);
    bpp = rd.u16(28);
    compression = rd.u32(30);
    colors_used = rd.u32(46);
  } else {
    throw FormatError(fmt::format("BMP: unsupported header size {}", dib_size));
  }

  const bool top_down = height < 0;
  if (top_down) height = -height;
  if (width <= 0 || height <= 0) throw FormatError("BMP: non-positive dimensions");

  const bool supported = (compression == kBiRgb && (bpp == 8 || bpp == 24 || bpp == 32)) ||
                         (compression == kBiRle8 && bpp == 8);
  if (!supported) {
    throw FormatError(fmt::format("BMP: unsupported bit depth {} with compression {} "
                                  "(supported: 8-bit palette, 8-bit RLE, 24-bit, 32-bit)",
                                  bpp, compression));
  }

  std::vector<Rgb> palette;
  if (bpp == 8) {
    const std::size_t count = colors_used ? colors_used : 256;
    if (count > 256) throw FormatError("BMP: palette larger than 256 entries");
    const std::size_t base = 14 + dib_size;
    rd.need(base, count * palette_entry);
    palette.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t off = base + i * palette_entry;
      palette[i] = {static_cast<std::uint8_t>(rd.u8(off + 2)), static_cast<std::uint8_t>(rd.u8(off + 1)),
                    static_cast<std::uint8_t>(rd.u8(off))};
    }
  }
  auto lookup = [&](std::uint32_t idx) -> Rgb {
    if (idx >= palette.size()) throw FormatError(fmt::format("BMP: palette index {} out of range", idx));
    return palette[idx];
  };

  const auto w = static_cast<std::size_t>(width);
  const auto h = static_cast<std::size_t>(height);
  RgbImage img(w, h);
  auto dest_row = [&](std::size_t file_row) { return top_down ? file_row : h - 1 - file_row; };

  if (compression == kBiRle8) {
    if (top_down) throw FormatError("BMP: RLE8 images cannot be top-down");
    const Rgb background = lookup(0);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c) img.at(r, c) = background;
    std::size_t off = pixel_offset;
    std::size_t x = 0;
    std::size_t y = 0;  // file row, counted from the bottom
    auto put = [&](std::uint32_t idx) {
      if (x < w && y < h) img.at(dest_row(y), x) = lookup(idx);
      ++x;
    };
    while (off + 1 < rd.size()) {
      const std::uint32_t count = rd.u8(off);
      const std::uint32_t value = rd.u8(off + 1);
      off += 2;
      if (count > 0) {
        for (std::uint32_t i = 0; i < count; ++i) put(value);
      } else if (value == 0) {
        x = 0;
        ++y;
      } else if (value == 1) {
        break;
      } else if (value == 2) {
        x += rd.u8(off);
        y += rd.u8(off + 1);
        off += 2;
      } else {
        for (std::uint32_t i = 0; i < value; ++i) put(rd.u8(off + i));
        off += value + (value & 1);
      }
    }
    return img;
  }

  const std::size_t stride = ((bpp * w + 31) / 32) * 4;
  rd.need(pixel_offset, stride * h);
  const std::size_t step = bpp / 8;
  for (std::size_t fr = 0; fr < h; ++fr) {
    const std::size_t base = pixel_offset + fr * stride;
    const std::size_t r = dest_row(fr);
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t p = base + c * step;
      if (bpp == 8) {
        img.at(r, c) = lookup(bytes[p]);
      } else {
        img.at(r, c) = {bytes[p + 2], bytes[p + 1], bytes[p]};
      }
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_bmp(const RgbImage& img) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const std::size_t stride = ((24 * w + 31) / 32) * 4;
  const std::size_t pixel_bytes = stride * h;
  std::vector<std::uint8_t> out;
  out.reserve(54 + pixel_bytes);
  out.push_back('B');
  out.push_back('M');
  put_u32(out, static_cast<std::uint32_t>(54 + pixel_bytes));
  put_u32(out, 0);
  put_u32(out, 54);
  put_u32(out, 40);
  put_u32(out, static_cast<std::uint32_t>(w));
  put_u32(out, static_cast<std::uint32_t>(h));
  put_u16(out, 1);
  put_u16(out, 24);
  put_u32(out, kBiRgb);
  put_u32(out, static_cast<std::uint32_t>(pixel_bytes));
  put_u32(out, 2835);  // 72 dpi
  put_u32(out, 2835);
  put_u32(out, 0);
  put_u32(out, 0);
  for (std::size_t fr = 0; fr < h; ++fr) {
    const std::size_t r = h - 1 - fr;
    for (std::size_t c = 0; c < w; ++c) {
      const Rgb& px = img.at(r, c);
      out.push_back(px[2]);
      out.push_back(px[1]);
      out.push_back(px[0]);
    }
    for (std::size_t pad = 3 * w; pad < stride; ++pad) out.push_back(0);
  }
  return out;
}

}  // namespace scriptid
