#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "scenred/dcnn.hpp"
#include "scenred/error.hpp"

namespace scenred {

/// Checkpoint format tag. Files carry this 16-byte prefix, little-endian
/// fields, flat weight arrays per layer, and a trailing FNV-1a 64 checksum of
/// everything before it.
inline constexpr char kModelMagic[16] = "scenred-dcnn-v1";  // 15 chars + NUL

namespace detail {

inline std::uint64_t fnv1a64(const unsigned char* data, std::size_t n) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= data[i];
    hash *= 1099511628211ULL;
  }
  return hash;
}

class ByteWriter {
 public:
  void raw(const void* src, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(src);
    buffer_.insert(buffer_.end(), bytes, bytes + n);
  }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void f64_array(const std::vector<double>& values) {
    u64(values.size());
    raw(values.data(), values.size() * sizeof(double));
  }
  const std::vector<unsigned char>& bytes() const { return buffer_; }

 private:
  std::vector<unsigned char> buffer_;
};

class ByteReader {
 public:
  ByteReader(const unsigned char* data, std::size_t n) : data_(data), size_(n) {}

  void raw(void* dst, std::size_t n) {
    if (pos_ + n > size_) fail(ErrorKind::ParseError, "model file ends mid-field");
    std::memcpy(dst, data_ + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, sizeof v);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, sizeof v);
    return v;
  }
  double f64() {
    double v;
    raw(&v, sizeof v);
    return v;
  }
  std::vector<double> f64_array(std::uint64_t expected) {
    const std::uint64_t n = u64();
    if (n != expected)
      fail(ErrorKind::ParseError, "model file parameter array has " + std::to_string(n) +
                                      " entries, expected " + std::to_string(expected));
    std::vector<double> values(static_cast<std::size_t>(n));
    raw(values.data(), values.size() * sizeof(double));
    return values;
  }
  bool exhausted() const { return pos_ == size_; }

 private:
  const unsigned char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline void save_model(const DcnnModel& model, const std::string& path) {
  detail::ByteWriter writer;
  writer.raw(kModelMagic, sizeof kModelMagic);
  writer.u32(static_cast<std::uint32_t>(model.horizon()));
  writer.u32(static_cast<std::uint32_t>(model.set_size()));
  writer.u32(static_cast<std::uint32_t>(model.reduced_size()));
  writer.u32(static_cast<std::uint32_t>(model.filter_width()));
  writer.f64(model.normalization.v_min);
  writer.f64(model.normalization.v_max);
  writer.u32(static_cast<std::uint32_t>(model.canonical_tag.size()));
  writer.raw(model.canonical_tag.data(), model.canonical_tag.size());
  const auto params = model.parameter_sets();
  writer.u32(static_cast<std::uint32_t>(params.size()));
  for (const nn::LayerParams* p : params) {
    writer.f64_array(p->weights);
    writer.f64_array(p->biases);
  }
  const std::uint64_t checksum = detail::fnv1a64(writer.bytes().data(), writer.bytes().size());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(writer.bytes().data()),
            static_cast<std::streamsize>(writer.bytes().size()));
  out.write(reinterpret_cast<const char*>(&checksum), sizeof checksum);
  if (!out) fail(ErrorKind::Io, "failed to write '" + path + "'");
}

inline DcnnModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof kModelMagic + sizeof(std::uint64_t))
    fail(ErrorKind::ChecksumMismatch, "model file is too short to carry a checksum");

  const std::size_t payload_size = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored_checksum;
  std::memcpy(&stored_checksum, bytes.data() + payload_size, sizeof stored_checksum);
  if (detail::fnv1a64(bytes.data(), payload_size) != stored_checksum)
    fail(ErrorKind::ChecksumMismatch, "model file checksum does not match its contents");

  detail::ByteReader reader(bytes.data(), payload_size);
  char magic[sizeof kModelMagic];
  reader.raw(magic, sizeof magic);
  if (std::memcmp(magic, kModelMagic, sizeof magic) != 0)
    fail(ErrorKind::FormatVersionMismatch, "model file format tag is not '" +
                                               std::string(kModelMagic) + "'");

  const int horizon = static_cast<int>(reader.u32());
  const int set_size = static_cast<int>(reader.u32());
  const int reduced_size = static_cast<int>(reader.u32());
  const int filter_width = static_cast<int>(reader.u32());
  DcnnModel model(horizon, set_size, reduced_size, filter_width);
  model.normalization.v_min = reader.f64();
  model.normalization.v_max = reader.f64();
  const std::uint32_t tag_len = reader.u32();
  std::string tag(tag_len, '\0');
  reader.raw(tag.data(), tag_len);
  model.canonical_tag = tag;

  const auto params = model.parameter_sets();
  const std::uint32_t n_layers = reader.u32();
  if (n_layers != params.size())
    fail(ErrorKind::ParseError, "model file carries " + std::to_string(n_layers) +
                                    " parameter blocks, expected " + std::to_string(params.size()));
  for (nn::LayerParams* p : params) {
    p->weights = reader.f64_array(p->weights.size());
    p->biases = reader.f64_array(p->biases.size());
  }
  if (!reader.exhausted()) fail(ErrorKind::ParseError, "model file has trailing bytes");
  return model;
}

}  // namespace scenred
