#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tss/io/io_error.hpp"

namespace tss::io {

enum class DType { Float32, Float64 };

/// A C-order little-endian array as stored in an .npy file. Values are
/// widened to double in memory regardless of the on-disk dtype.
struct NpyArray {
  std::vector<std::size_t> shape;
  DType dtype = DType::Float32;
  std::vector<double> data;

  std::size_t element_count() const;
};

/// Encodes a version 1.0 .npy payload.
std::string encode_npy(std::span<const double> data, const std::vector<std::size_t>& shape,
                       DType dtype = DType::Float32);
NpyArray decode_npy(std::string_view bytes);

void write_npy(const std::filesystem::path& path, std::span<const double> data,
               const std::vector<std::size_t>& shape, DType dtype = DType::Float32);
NpyArray read_npy(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace tss::io
