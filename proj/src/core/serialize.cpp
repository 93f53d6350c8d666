#include "drl/core/serialize.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>

#include "drl/core/errors.hpp"

namespace drl {

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
  u64(s.size());
  bytes_.append(s);
}

void ByteWriter::f64s(std::span<const double> values) {
  u64(values.size());
  for (double v : values) f64(v);
}

std::string_view ByteReader::take(std::size_t n) {
  if (bytes_.size() - pos_ < n) throw UsageError("archive: truncated payload");
  auto out = bytes_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::uint32_t ByteReader::u32() {
  auto b = take(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

std::uint64_t ByteReader::u64() {
  auto b = take(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str() {
  const auto n = u64();
  return std::string(take(n));
}

std::vector<double> ByteReader::f64s() {
  const auto n = u64();
  if (n > (bytes_.size() - pos_) / 8) throw UsageError("archive: array length exceeds payload");
  std::vector<double> out(n);
  for (auto& v : out) v = f64();
  return out;
}

void Archive::put(std::string_view tag, std::string payload) {
  require(tag.size() == 4, "archive: tags are four characters");
  for (auto& [t, p] : records_) {
    if (t == tag) {
      p = std::move(payload);
      return;
    }
  }
  records_.emplace_back(std::string(tag), std::move(payload));
}

bool Archive::has(std::string_view tag) const {
  return std::any_of(records_.begin(), records_.end(), [&](const auto& r) { return r.first == tag; });
}

const std::string& Archive::get(std::string_view tag) const {
  for (const auto& [t, p] : records_) {
    if (t == tag) return p;
  }
  throw UsageError("archive: missing record '" + std::string(tag) + "'");
}

std::vector<std::string> Archive::tags() const {
  std::vector<std::string> out;
  for (const auto& r : records_) out.push_back(r.first);
  return out;
}

std::string Archive::serialize() const {
  ByteWriter w;
  w.u32(kArchiveVersion);
  w.u32(static_cast<std::uint32_t>(records_.size()));
  std::string out(kArchiveMagic);
  out += w.bytes();
  for (const auto& [tag, payload] : records_) {
    ByteWriter header;
    header.u64(payload.size());
    out += tag;
    out += header.bytes();
    out += payload;
  }
  return out;
}

Archive Archive::parse(std::string_view bytes) {
  if (bytes.substr(0, 4) != kArchiveMagic) throw UsageError("archive: bad magic (expected DRL1)");
  ByteReader r(bytes.substr(4));
  const auto version = r.u32();
  if (version != kArchiveVersion) {
    throw UsageError("archive: unsupported version " + std::to_string(version));
  }
  const auto count = r.u32();
  Archive a;
  std::size_t pos = 12;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (bytes.size() < pos + 12) throw UsageError("archive: truncated record header");
    std::string tag(bytes.substr(pos, 4));
    ByteReader len_reader(bytes.substr(pos + 4, 8));
    const auto len = len_reader.u64();
    pos += 12;
    if (bytes.size() - pos < len) throw UsageError("archive: truncated record '" + tag + "'");
    a.records_.emplace_back(std::move(tag), std::string(bytes.substr(pos, len)));
    pos += len;
  }
  if (pos != bytes.size()) throw UsageError("archive: trailing bytes");
  return a;
}

void Archive::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const auto bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Archive Archive::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(bytes);
}

void write_schema(ByteWriter& w, const StateSchema& schema) {
  w.u32(static_cast<std::uint32_t>(schema.n_continuous));
  w.u32(static_cast<std::uint32_t>(schema.categorical_cards.size()));
  for (int c : schema.categorical_cards) w.u32(static_cast<std::uint32_t>(c));
}

StateSchema read_schema(ByteReader& r) {
  StateSchema s;
  s.n_continuous = static_cast<int>(r.u32());
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) s.categorical_cards.push_back(static_cast<int>(r.u32()));
  return s;
}

void write_state(ByteWriter& w, const MixedState& state) {
  w.f64s(state.continuous);
  w.u32(static_cast<std::uint32_t>(state.categorical.size()));
  for (const auto& c : state.categorical) {
    w.u32(static_cast<std::uint32_t>(c.cardinality));
    w.u32(static_cast<std::uint32_t>(c.index));
  }
}

MixedState read_state(ByteReader& r) {
  MixedState s;
  s.continuous = r.f64s();
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    const int card = static_cast<int>(r.u32());
    const int idx = static_cast<int>(r.u32());
    s.categorical.push_back({card, idx});
  }
  return s;
}

}  // namespace drl
