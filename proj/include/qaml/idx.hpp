#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qaml/image.hpp"

namespace qaml {

// MNIST IDX binary format, bit-exact: big-endian 32-bit magic and
// dimensions; image magic 0x00000803, label magic 0x00000801;
// unsigned-byte payloads. Pixels are scaled by 1/255 on parse.

constexpr uint32_t kIdxImageMagic = 0x00000803;
constexpr uint32_t kIdxLabelMagic = 0x00000801;

// Throws FormatError (with byte offset for truncation) on malformed input.
std::vector<ImageTensor> parse_idx_images(std::span<const uint8_t> bytes);
std::vector<int> parse_idx_labels(std::span<const uint8_t> bytes);

std::vector<uint8_t> write_idx_images(const std::vector<ImageTensor>& images);
std::vector<uint8_t> write_idx_labels(const std::vector<int>& labels);

// Reads a whole file; gzip input (1f 8b) is decompressed transparently.
std::vector<uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path,
                       std::span<const uint8_t> bytes, bool gzip = false);

// Paired image/label load into a dataset with an identity class map over
// the digits present.
LabeledDataset load_idx_dataset(const std::string& images_path,
                                const std::string& labels_path);
void save_idx_dataset(const LabeledDataset& dataset,
                      const std::string& images_path,
                      const std::string& labels_path, bool gzip = false);

}  // namespace qaml
