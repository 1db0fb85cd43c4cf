#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/crc.hpp>

#include "anng/dataset.hpp"
#include "anng/errors.hpp"
#include "anng/graph.hpp"

namespace anng {

inline constexpr std::uint16_t kGraphFormatVersion = 1;
inline constexpr std::uint16_t kDatasetFormatVersion = 1;

inline std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

/// Little-endian byte sink.
class ByteWriter {
 public:
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }

  /// Appends CRC32 of everything written so far.
  void seal() { u32(crc32(bytes_)); }

  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

 private:
  void put(std::uint64_t v, int width) {
    for (int k = 0; k < width; ++k) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  std::vector<std::uint8_t> bytes_;
};

/// Little-endian byte source over a checksummed payload.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string_view raw(std::size_t len) {
    need(len);
    std::string_view s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
    pos_ += len;
    return s;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t len) const {
    if (len > remaining()) throw FormatError(FormatError::Kind::Malformed, "unexpected end of payload");
  }
  std::uint64_t get(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int k = 0; k < width; ++k) v |= std::uint64_t{bytes_[pos_ + k]} << (8 * k);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

/// Writes via a sibling temp file and rename, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatError::Kind::Io, "cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw FormatError(FormatError::Kind::Io, "write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw FormatError(FormatError::Kind::Io, "cannot rename into '" + path.string() + "'");
  }
}

inline void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::Io, "cannot open '" + path.string() + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

namespace detail {

// Checks magic, trailing CRC and version; returns a reader positioned after the version.
inline ByteReader open_payload(std::span<const std::uint8_t> bytes, std::string_view magic, std::uint16_t version,
                               std::string_view what) {
  if (bytes.size() < magic.size() + 2 + 4 ||
      std::memcmp(bytes.data(), magic.data(), magic.size()) != 0)
    throw FormatError(FormatError::Kind::Malformed, std::string(what) + ": bad magic, expected '" +
                                                        std::string(magic) + "'");
  const auto body = bytes.first(bytes.size() - 4);
  ByteReader tail(bytes.last(4));
  const std::uint32_t stored = tail.u32();
  if (crc32(body) != stored)
    throw FormatError(FormatError::Kind::Checksum, std::string(what) + ": checksum mismatch (truncated or corrupt)");
  ByteReader r(body);
  r.raw(magic.size());
  const std::uint16_t got = r.u16();
  if (got != version) {
    std::ostringstream os;
    os << what << ": format version " << got << " not supported (expected " << version << ")";
    throw FormatError(FormatError::Kind::VersionMismatch, os.str());
  }
  return r;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_graph(const NeighborGraph& g) {
  ByteWriter w;
  w.raw("ANNG");
  w.u16(kGraphFormatVersion);
  w.u64(g.size());
  w.u64(g.dimension());
  w.f64(g.model().tau());
  w.u8(g.model().tag());
  for (double p : g.model().parameters()) w.f64(p);
  w.u64(g.seed());
  for (std::uint64_t off : g.offsets()) w.u64(off);
  for (VertexId t : g.targets()) w.u64(t);
  w.seal();
  return w.bytes();
}

inline NeighborGraph decode_graph(std::span<const std::uint8_t> bytes) {
  ByteReader r = detail::open_payload(bytes, "ANNG", kGraphFormatVersion, "graph file");
  const std::uint64_t n = r.u64();
  const std::uint64_t d = r.u64();
  const double tau = r.f64();
  const std::uint8_t tag = r.u8();
  if (tag > 3) throw FormatError(FormatError::Kind::Malformed, "graph file: unknown model tag");
  std::vector<double> params(EdgeModel::parameter_count(tag));
  for (double& p : params) p = r.f64();
  const std::uint64_t seed = r.u64();
  if (n + 1 > r.remaining() / 8) throw FormatError(FormatError::Kind::Malformed, "graph file: offsets truncated");
  std::vector<std::uint64_t> offsets(n + 1);
  for (auto& o : offsets) o = r.u64();
  const std::uint64_t m = offsets.back();
  if (m != r.remaining() / 8 || r.remaining() % 8 != 0)
    throw FormatError(FormatError::Kind::Malformed, "graph file: neighbor array length disagrees with offsets");
  std::vector<VertexId> targets(m);
  for (auto& t : targets) {
    const std::uint64_t v = r.u64();
    if (v >= n) throw FormatError(FormatError::Kind::Malformed, "graph file: neighbor index out of range");
    t = static_cast<VertexId>(v);
  }
  try {
    return NeighborGraph(d, EdgeModel::from_tag(tag, params, tau), seed, std::move(offsets), std::move(targets));
  } catch (const std::exception& e) {
    throw FormatError(FormatError::Kind::Malformed, std::string("graph file: ") + e.what());
  }
}

inline void serialize(const NeighborGraph& g, const std::filesystem::path& path) {
  write_file_atomic(path, encode_graph(g));
}

inline NeighborGraph deserialize_graph(const std::filesystem::path& path) { return decode_graph(read_file(path)); }

inline std::vector<std::uint8_t> encode_dataset(const Dataset& data) {
  ByteWriter w;
  w.raw("ANND");
  w.u16(kDatasetFormatVersion);
  w.u64(data.size());
  w.u64(data.dimension());
  w.f64(data.params().omega());
  for (double c : data.coords()) w.f64(c);
  w.seal();
  return w.bytes();
}

inline Dataset decode_dataset(std::span<const std::uint8_t> bytes) {
  ByteReader r = detail::open_payload(bytes, "ANND", kDatasetFormatVersion, "dataset file");
  const std::uint64_t n = r.u64();
  const std::uint64_t d = r.u64();
  const double omega = r.f64();
  if (d == 0 || n == 0 || r.remaining() % 8 != 0 || r.remaining() / 8 / d != n || (r.remaining() / 8) % d != 0)
    throw FormatError(FormatError::Kind::Malformed, "dataset file: coordinate block disagrees with n*d");
  try {
    const DensityParams params = DensityParams::from_counts(n, d);
    if (params.omega() != omega) throw FormatError(FormatError::Kind::Malformed, "dataset file: omega disagrees with log2(n)/d");
    std::vector<double> coords(n * d);
    for (double& c : coords) c = r.f64();
    return Dataset(params, std::move(coords));
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(FormatError::Kind::Malformed, std::string("dataset file: ") + e.what());
  }
}

inline void write_dataset(const Dataset& data, const std::filesystem::path& path) {
  write_file_atomic(path, encode_dataset(data));
}

inline Dataset read_dataset(const std::filesystem::path& path) { return decode_dataset(read_file(path)); }

}  // namespace anng
