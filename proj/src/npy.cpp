#include "tss/io/npy.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

static_assert(std::endian::native == std::endian::little, "npy codec assumes a little-endian host");

namespace tss::io {

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;

std::string descr_of(DType dtype) { return dtype == DType::Float32 ? "<f4" : "<f8"; }

std::string shape_literal(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  if (shape.size() == 1) os << ',';
  os << ')';
  return os.str();
}

// Returns the text following `'key':` up to (not including) the next top-level comma.
std::string dict_value(std::string_view header, std::string_view key) {
  const std::string quoted = "'" + std::string(key) + "'";
  const auto pos = header.find(quoted);
  if (pos == std::string_view::npos) throw IoError("npy header lacks " + quoted);
  auto colon = header.find(':', pos + quoted.size());
  if (colon == std::string_view::npos) throw IoError("malformed npy header");
  std::size_t i = colon + 1;
  while (i < header.size() && header[i] == ' ') ++i;
  int depth = 0;
  std::size_t j = i;
  for (; j < header.size(); ++j) {
    const char c = header[j];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if ((c == ',' || c == '}') && depth == 0) break;
  }
  return std::string(header.substr(i, j - i));
}

std::vector<std::size_t> parse_shape(const std::string& literal) {
  if (literal.size() < 2 || literal.front() != '(' || literal.back() != ')') {
    throw IoError("malformed npy shape " + literal);
  }
  std::vector<std::size_t> shape;
  std::string token;
  for (char c : literal.substr(1, literal.size() - 2)) {
    if (c == ',') {
      if (!token.empty()) shape.push_back(std::stoull(token));
      token.clear();
    } else if (c != ' ') {
      token.push_back(c);
    }
  }
  if (!token.empty()) shape.push_back(std::stoull(token));
  return shape;
}

}  // namespace

std::size_t NpyArray::element_count() const {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string encode_npy(std::span<const double> data, const std::vector<std::size_t>& shape,
                       DType dtype) {
  std::size_t count = 1;
  for (auto d : shape) count *= d;
  if (count != data.size()) throw std::invalid_argument("npy shape does not match data length");

  std::string header = "{'descr': '" + descr_of(dtype) + "', 'fortran_order': False, 'shape': " +
                       shape_literal(shape) + ", }";
  // Pad so the payload starts on a 64-byte boundary; header ends with '\n'.
  const std::size_t preamble = kMagicLen + 2 + 2;
  const std::size_t total = preamble + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header.push_back('\n');
  if (header.size() > 0xFFFF) throw std::invalid_argument("npy header too long for v1.0");

  std::string out(kMagic, kMagicLen);
  out.push_back('\x01');
  out.push_back('\x00');
  const auto len = static_cast<std::uint16_t>(header.size());
  out.push_back(static_cast<char>(len & 0xFF));
  out.push_back(static_cast<char>(len >> 8));
  out += header;

  const std::size_t width = dtype == DType::Float32 ? 4 : 8;
  const std::size_t start = out.size();
  out.resize(start + width * data.size());
  char* dst = out.data() + start;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (dtype == DType::Float32) {
      const auto f = static_cast<float>(data[i]);
      std::memcpy(dst + 4 * i, &f, 4);
    } else {
      std::memcpy(dst + 8 * i, &data[i], 8);
    }
  }
  return out;
}

NpyArray decode_npy(std::string_view bytes) {
  if (bytes.size() < kMagicLen + 4 || bytes.substr(0, kMagicLen) != std::string_view(kMagic, kMagicLen)) {
    throw IoError("not an npy file");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<unsigned char>(bytes[9]) << 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw IoError("truncated npy header");
    for (int i = 3; i >= 0; --i) header_len = (header_len << 8) | static_cast<unsigned char>(bytes[8 + i]);
    offset = 12;
  } else {
    throw IoError("unsupported npy version " + std::to_string(major));
  }
  if (bytes.size() < offset + header_len) throw IoError("truncated npy header");
  const std::string_view header = bytes.substr(offset, header_len);

  NpyArray out;
  const std::string descr = dict_value(header, "descr");
  if (descr == "'<f4'") {
    out.dtype = DType::Float32;
  } else if (descr == "'<f8'") {
    out.dtype = DType::Float64;
  } else {
    throw IoError("unsupported npy dtype " + descr);
  }
  if (dict_value(header, "fortran_order") != "False") {
    throw IoError("fortran-ordered npy arrays are not supported");
  }
  out.shape = parse_shape(dict_value(header, "shape"));

  const std::size_t count = out.element_count();
  const std::size_t width = out.dtype == DType::Float32 ? 4 : 8;
  const std::string_view payload = bytes.substr(offset + header_len);
  if (payload.size() != count * width) {
    throw IoError("npy payload holds " + std::to_string(payload.size()) + " bytes, expected " +
                  std::to_string(count * width));
  }
  out.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (out.dtype == DType::Float32) {
      float f;
      std::memcpy(&f, payload.data() + 4 * i, 4);
      out.data[i] = f;
    } else {
      std::memcpy(&out.data[i], payload.data() + 8 * i, 8);
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_npy(const std::filesystem::path& path, std::span<const double> data,
               const std::vector<std::size_t>& shape, DType dtype) {
  write_file(path, encode_npy(data, shape, dtype));
}

NpyArray read_npy(const std::filesystem::path& path) {
  try {
    return decode_npy(read_file(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace tss::io
