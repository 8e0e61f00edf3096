#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <fstream>

#include "ctrec/image.hpp"

namespace ctrec {

namespace {

const std::uint8_t kPngSig[8] = {137, 80, 78, 71, 13, 10, 26, 10};

std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
         std::uint32_t(p[3]);
}

void put_be32(std::vector<std::uint8_t>* out, std::uint32_t v) {
  out->push_back(static_cast<std::uint8_t>(v >> 24));
  out->push_back(static_cast<std::uint8_t>(v >> 16));
  out->push_back(static_cast<std::uint8_t>(v >> 8));
  out->push_back(static_cast<std::uint8_t>(v));
}

void append_chunk(std::vector<std::uint8_t>* out, const char type[4],
                  const std::uint8_t* data, size_t len) {
  put_be32(out, static_cast<std::uint32_t>(len));
  size_t start = out->size();
  out->insert(out->end(), type, type + 4);
  if (len) out->insert(out->end(), data, data + len);
  std::uint32_t crc = crc32(0, out->data() + start, static_cast<uInt>(len + 4));
  put_be32(out, crc);
}

std::vector<std::uint8_t> zlib_inflate(const std::uint8_t* data, size_t len, size_t expect) {
  std::vector<std::uint8_t> out(expect);
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  if (inflateInit(&zs) != Z_OK) fail(Err::Format, "inflate init failed");
  zs.next_in = const_cast<Bytef*>(data);
  zs.avail_in = static_cast<uInt>(len);
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.avail_out != 0) fail(Err::Format, "corrupt or truncated PNG stream");
  return out;
}

int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

void unfilter(std::vector<std::uint8_t>& raw, int width, int height, int bpp) {
  const size_t stride = static_cast<size_t>(width) * bpp;
  std::vector<std::uint8_t> prev(stride, 0);
  for (int y = 0; y < height; ++y) {
    std::uint8_t* row = raw.data() + static_cast<size_t>(y) * (stride + 1);
    int filter = row[0];
    std::uint8_t* cur = row + 1;
    switch (filter) {
      case 0:
        break;
      case 1:
        for (size_t i = bpp; i < stride; ++i) cur[i] = static_cast<std::uint8_t>(cur[i] + cur[i - bpp]);
        break;
      case 2:
        for (size_t i = 0; i < stride; ++i) cur[i] = static_cast<std::uint8_t>(cur[i] + prev[i]);
        break;
      case 3:
        for (size_t i = 0; i < stride; ++i) {
          int left = i >= static_cast<size_t>(bpp) ? cur[i - bpp] : 0;
          cur[i] = static_cast<std::uint8_t>(cur[i] + ((left + prev[i]) >> 1));
        }
        break;
      case 4:
        for (size_t i = 0; i < stride; ++i) {
          int left = i >= static_cast<size_t>(bpp) ? cur[i - bpp] : 0;
          int ul = i >= static_cast<size_t>(bpp) ? prev[i - bpp] : 0;
          cur[i] = static_cast<std::uint8_t>(cur[i] + paeth(left, prev[i], ul));
        }
        break;
      default:
        fail(Err::Format, "unknown PNG filter type");
    }
    std::memcpy(prev.data(), cur, stride);
  }
}

}  // namespace

ImageRGB decode_png(const std::uint8_t* bytes, size_t len) {
  if (len < 8 || std::memcmp(bytes, kPngSig, 8) != 0) fail(Err::Format, "not a PNG file");
  size_t pos = 8;
  int width = 0, height = 0, bitdepth = 0, colortype = 0;
  std::vector<std::uint8_t> idat;
  std::vector<std::uint8_t> palette;  // rgb triples
  bool saw_ihdr = false, saw_iend = false;
  while (pos + 8 <= len) {
    std::uint32_t clen = be32(bytes + pos);
    if (pos + 12 + clen > len) fail(Err::Format, "truncated PNG chunk");
    const char* type = reinterpret_cast<const char*>(bytes + pos + 4);
    const std::uint8_t* data = bytes + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (clen != 13) fail(Err::Format, "bad IHDR");
      width = static_cast<int>(be32(data));
      height = static_cast<int>(be32(data + 4));
      bitdepth = data[8];
      colortype = data[9];
      if (data[12] != 0) fail(Err::Format, "interlaced PNG not supported");
      if (bitdepth != 8) fail(Err::Format, "only 8-bit PNG supported");
      if (width <= 0 || height <= 0) fail(Err::Format, "bad PNG dimensions");
      saw_ihdr = true;
    } else if (std::memcmp(type, "PLTE", 4) == 0) {
      palette.assign(data, data + clen);
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + clen);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      saw_iend = true;
      break;
    }
    pos += 12 + clen;
  }
  if (!saw_ihdr || !saw_iend || idat.empty()) fail(Err::Format, "incomplete PNG");

  int channels;
  switch (colortype) {
    case 0: channels = 1; break;
    case 2: channels = 3; break;
    case 3: channels = 1; break;
    case 4: channels = 2; break;
    case 6: channels = 4; break;
    default: fail(Err::Format, "unsupported PNG color type");
  }
  size_t stride = static_cast<size_t>(width) * channels;
  std::vector<std::uint8_t> raw = zlib_inflate(idat.data(), idat.size(), (stride + 1) * height);
  unfilter(raw, width, height, channels);

  ImageRGB img;
  img.width = width;
  img.height = height;
  img.data.resize(static_cast<size_t>(width) * height * 3);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* row = raw.data() + static_cast<size_t>(y) * (stride + 1) + 1;
    for (int x = 0; x < width; ++x) {
      const std::uint8_t* px = row + static_cast<size_t>(x) * channels;
      std::uint8_t r, g, b;
      switch (colortype) {
        case 0:
        case 4:
          r = g = b = px[0];
          break;
        case 3: {
          size_t idx = static_cast<size_t>(px[0]) * 3;
          if (idx + 2 >= palette.size()) fail(Err::Format, "palette index out of range");
          r = palette[idx];
          g = palette[idx + 1];
          b = palette[idx + 2];
          break;
        }
        default:
          r = px[0];
          g = px[1];
          b = px[2];
      }
      img.at(x, y, 0) = r;
      img.at(x, y, 1) = g;
      img.at(x, y, 2) = b;
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_png(const ImageRGB& img) {
  std::vector<std::uint8_t> out(kPngSig, kPngSig + 8);

  std::uint8_t ihdr[13];
  ihdr[0] = static_cast<std::uint8_t>(img.width >> 24);
  ihdr[1] = static_cast<std::uint8_t>(img.width >> 16);
  ihdr[2] = static_cast<std::uint8_t>(img.width >> 8);
  ihdr[3] = static_cast<std::uint8_t>(img.width);
  ihdr[4] = static_cast<std::uint8_t>(img.height >> 24);
  ihdr[5] = static_cast<std::uint8_t>(img.height >> 16);
  ihdr[6] = static_cast<std::uint8_t>(img.height >> 8);
  ihdr[7] = static_cast<std::uint8_t>(img.height);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 2;   // truecolor
  ihdr[10] = ihdr[11] = ihdr[12] = 0;
  append_chunk(&out, "IHDR", ihdr, 13);

  size_t stride = static_cast<size_t>(img.width) * 3;
  std::vector<std::uint8_t> raw((stride + 1) * img.height);
  for (int y = 0; y < img.height; ++y) {
    std::uint8_t* row = raw.data() + static_cast<size_t>(y) * (stride + 1);
    row[0] = 0;  // filter: none
    std::memcpy(row + 1, img.data.data() + static_cast<size_t>(y) * stride, stride);
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> comp(bound);
  if (compress2(comp.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    fail(Err::Io, "zlib compression failed");
  comp.resize(bound);
  append_chunk(&out, "IDAT", comp.data(), comp.size());
  append_chunk(&out, "IEND", nullptr, 0);
  return out;
}

ImageRGB decode_ppm(const std::uint8_t* bytes, size_t len) {
  size_t pos = 0;
  auto skip_space = [&] {
    while (pos < len) {
      if (bytes[pos] == '#') {
        while (pos < len && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> long {
    skip_space();
    if (pos >= len || !std::isdigit(bytes[pos])) fail(Err::Format, "bad PPM header");
    long v = 0;
    while (pos < len && std::isdigit(bytes[pos])) v = v * 10 + (bytes[pos++] - '0');
    return v;
  };
  if (len < 2 || bytes[0] != 'P' || bytes[1] != '6') fail(Err::Format, "not a P6 PPM");
  pos = 2;
  long w = read_int(), h = read_int(), maxval = read_int();
  if (w <= 0 || h <= 0 || maxval != 255) fail(Err::Format, "unsupported PPM header");
  ++pos;  // single whitespace after maxval
  size_t need = static_cast<size_t>(w) * h * 3;
  if (pos + need > len) fail(Err::Format, "truncated PPM pixel data");
  ImageRGB img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.data.assign(bytes + pos, bytes + pos + need);
  return img;
}

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Err::Io, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) fail(Err::Io, "read error on " + path);
  return bytes;
}

void write_file(const std::string& path, const void* data, size_t len) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(Err::Io, "cannot create " + path);
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
  if (!f) fail(Err::Io, "write error on " + path);
}

}  // namespace

ImageRGB load_image(const std::string& path) {
  std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSig, 8) == 0)
    return decode_png(bytes.data(), bytes.size());
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6')
    return decode_ppm(bytes.data(), bytes.size());
  fail(Err::Format, "unrecognized image format: " + path);
}

void save_png(const ImageRGB& img, const std::string& path) {
  std::vector<std::uint8_t> bytes = encode_png(img);
  write_file(path, bytes.data(), bytes.size());
}

void save_ppm(const ImageRGB& img, const std::string& path) {
  char header[64];
  int n = std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n", img.width, img.height);
  std::vector<std::uint8_t> bytes(header, header + n);
  bytes.insert(bytes.end(), img.data.begin(), img.data.end());
  write_file(path, bytes.data(), bytes.size());
}

}  // namespace ctrec
