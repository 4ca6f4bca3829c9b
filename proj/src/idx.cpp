#include "qaml/idx.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>

#include "qaml/errors.hpp"

namespace qaml {

namespace {

// Big-endian u32 read with truncation diagnostics.
uint32_t read_u32(std::span<const uint8_t> bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) {
    throw FormatError("truncated IDX stream: need 4 bytes at offset " +
                      std::to_string(offset) + ", have " +
                      std::to_string(bytes.size() - offset));
  }
  return (uint32_t(bytes[offset]) << 24) | (uint32_t(bytes[offset + 1]) << 16) |
         (uint32_t(bytes[offset + 2]) << 8) | uint32_t(bytes[offset + 3]);
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(uint8_t(v >> 24));
  out.push_back(uint8_t(v >> 16));
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v));
}

bool is_gzip(std::span<const uint8_t> bytes) {
  return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<uint8_t> gunzip(std::span<const uint8_t> bytes) {
  z_stream strm{};
  // 15+16: zlib niceness for "expect a gzip wrapper".
  if (inflateInit2(&strm, 15 + 16) != Z_OK) {
    throw FormatError("zlib inflateInit2 failed");
  }
  std::vector<uint8_t> out;
  out.reserve(bytes.size() * 4);
  std::vector<uint8_t> chunk(1 << 16);
  strm.next_in = const_cast<Bytef*>(bytes.data());
  strm.avail_in = static_cast<uInt>(bytes.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    strm.next_out = chunk.data();
    strm.avail_out = static_cast<uInt>(chunk.size());
    rc = inflate(&strm, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&strm);
      throw FormatError("gzip decompression failed (zlib rc " +
                        std::to_string(rc) + ")");
    }
    out.insert(out.end(), chunk.data(),
               chunk.data() + (chunk.size() - strm.avail_out));
    if (rc == Z_OK && strm.avail_in == 0 && strm.avail_out != 0) {
      inflateEnd(&strm);
      throw FormatError("gzip stream truncated");
    }
  }
  inflateEnd(&strm);
  return out;
}

std::vector<uint8_t> gzip_compress(std::span<const uint8_t> bytes) {
  z_stream strm{};
  if (deflateInit2(&strm, Z_BEST_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw FormatError("zlib deflateInit2 failed");
  }
  std::vector<uint8_t> out;
  std::vector<uint8_t> chunk(1 << 16);
  strm.next_in = const_cast<Bytef*>(bytes.data());
  strm.avail_in = static_cast<uInt>(bytes.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    strm.next_out = chunk.data();
    strm.avail_out = static_cast<uInt>(chunk.size());
    rc = deflate(&strm, Z_FINISH);
    if (rc == Z_STREAM_ERROR) {
      deflateEnd(&strm);
      throw FormatError("gzip compression failed");
    }
    out.insert(out.end(), chunk.data(),
               chunk.data() + (chunk.size() - strm.avail_out));
  }
  deflateEnd(&strm);
  return out;
}

}  // namespace

std::vector<ImageTensor> parse_idx_images(std::span<const uint8_t> bytes) {
  const uint32_t magic = read_u32(bytes, 0);
  if (magic != kIdxImageMagic) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "0x%08x", magic);
    throw FormatError(std::string("bad IDX image magic ") + buf +
                      ", expected 0x00000803");
  }
  const uint32_t count = read_u32(bytes, 4);
  const uint32_t rows = read_u32(bytes, 8);
  const uint32_t cols = read_u32(bytes, 12);
  if (rows == 0 || cols == 0) {
    throw FormatError("IDX image dimensions must be nonzero");
  }
  const std::size_t need = 16 + std::size_t(count) * rows * cols;
  if (bytes.size() < need) {
    throw FormatError("truncated IDX image payload: need " +
                      std::to_string(need) + " bytes, have " +
                      std::to_string(bytes.size()) +
                      " (short at offset " + std::to_string(bytes.size()) +
                      ")");
  }
  std::vector<ImageTensor> images;
  images.reserve(count);
  std::size_t off = 16;
  for (uint32_t n = 0; n < count; ++n) {
    ImageTensor img{int(rows), int(cols)};
    for (uint32_t r = 0; r < rows; ++r) {
      for (uint32_t c = 0; c < cols; ++c) {
        img.values(r, c) = double(bytes[off++]) / 255.0;
      }
    }
    images.push_back(std::move(img));
  }
  return images;
}

std::vector<int> parse_idx_labels(std::span<const uint8_t> bytes) {
  const uint32_t magic = read_u32(bytes, 0);
  if (magic != kIdxLabelMagic) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "0x%08x", magic);
    throw FormatError(std::string("bad IDX label magic ") + buf +
                      ", expected 0x00000801");
  }
  const uint32_t count = read_u32(bytes, 4);
  const std::size_t need = 8 + std::size_t(count);
  if (bytes.size() < need) {
    throw FormatError("truncated IDX label payload: need " +
                      std::to_string(need) + " bytes, have " +
                      std::to_string(bytes.size()) +
                      " (short at offset " + std::to_string(bytes.size()) +
                      ")");
  }
  std::vector<int> labels;
  labels.reserve(count);
  for (uint32_t n = 0; n < count; ++n) {
    const uint8_t v = bytes[8 + n];
    if (v > 9) {
      throw FormatError("IDX label byte " + std::to_string(int(v)) +
                        " out of digit range at offset " +
                        std::to_string(8 + n));
    }
    labels.push_back(int(v));
  }
  return labels;
}

std::vector<uint8_t> write_idx_images(const std::vector<ImageTensor>& images) {
  std::vector<uint8_t> out;
  const uint32_t count = uint32_t(images.size());
  const uint32_t rows = images.empty() ? 0 : uint32_t(images[0].height);
  const uint32_t cols = images.empty() ? 0 : uint32_t(images[0].width);
  out.reserve(16 + std::size_t(count) * rows * cols);
  put_u32(out, kIdxImageMagic);
  put_u32(out, count);
  put_u32(out, rows);
  put_u32(out, cols);
  for (const auto& img : images) {
    if (uint32_t(img.height) != rows || uint32_t(img.width) != cols) {
      throw FormatError("IDX writer requires uniform image dimensions");
    }
    for (int r = 0; r < img.height; ++r) {
      for (int c = 0; c < img.width; ++c) {
        const double v = img.values(r, c) * 255.0;
        const long b = std::lround(std::min(255.0, std::max(0.0, v)));
        out.push_back(uint8_t(b));
      }
    }
  }
  return out;
}

std::vector<uint8_t> write_idx_labels(const std::vector<int>& labels) {
  std::vector<uint8_t> out;
  out.reserve(8 + labels.size());
  put_u32(out, kIdxLabelMagic);
  put_u32(out, uint32_t(labels.size()));
  for (int v : labels) {
    if (v < 0 || v > 9) {
      throw FormatError("IDX label value " + std::to_string(v) +
                        " out of digit range");
    }
    out.push_back(uint8_t(v));
  }
  return out;
}

std::vector<uint8_t> read_binary_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw FormatError("cannot open file: " + path);
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  if (is_gzip(bytes)) {
    return gunzip(bytes);
  }
  return bytes;
}

void write_binary_file(const std::string& path, std::span<const uint8_t> bytes,
                       bool gzip) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw FormatError("cannot open file for writing: " + path);
  }
  if (gzip) {
    const auto compressed = gzip_compress(bytes);
    f.write(reinterpret_cast<const char*>(compressed.data()),
            std::streamsize(compressed.size()));
  } else {
    f.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  }
  if (!f) {
    throw FormatError("write failed: " + path);
  }
}

LabeledDataset load_idx_dataset(const std::string& images_path,
                                const std::string& labels_path) {
  LabeledDataset d;
  d.images = parse_idx_images(read_binary_file(images_path));
  d.labels = parse_idx_labels(read_binary_file(labels_path));
  if (d.images.size() != d.labels.size()) {
    throw FormatError("image/label count mismatch: " +
                      std::to_string(d.images.size()) + " images vs " +
                      std::to_string(d.labels.size()) + " labels");
  }
  // Contiguous class indices in ascending digit order; identity when all
  // ten digits are present.
  std::map<int, int> seen;
  for (int v : d.labels) seen[v] = 0;
  int next = 0;
  for (auto& [digit, cls] : seen) cls = next++;
  d.class_map = seen;
  for (int& v : d.labels) v = seen.at(v);
  return d;
}

void save_idx_dataset(const LabeledDataset& dataset,
                      const std::string& images_path,
                      const std::string& labels_path, bool gzip) {
  std::vector<int> digits;
  digits.reserve(dataset.labels.size());
  for (int cls : dataset.labels) digits.push_back(dataset.digit_of(cls));
  write_binary_file(images_path, write_idx_images(dataset.images), gzip);
  write_binary_file(labels_path, write_idx_labels(digits), gzip);
}

}  // namespace qaml
