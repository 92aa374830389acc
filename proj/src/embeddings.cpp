#include "newsxlt/embeddings.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace newsxlt {
namespace {

using Matrix = EmbeddingTablef::Matrix;

template <typename T>
T read_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw Error(std::string("truncated embedding file while reading ") + what);
  std::conditional_t<sizeof(T) == 8, std::uint64_t, std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>
      v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<decltype(v)>(bytes[i]) << (8 * i);
  if constexpr (std::is_floating_point_v<T>)
    return std::bit_cast<T>(v);
  else
    return static_cast<T>(v);
}

template <typename T>
void write_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  U v;
  if constexpr (std::is_floating_point_v<T>)
    v = std::bit_cast<U>(value);
  else
    v = static_cast<U>(value);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

EmbeddingTablef build(std::vector<std::string> ids, std::vector<float> values, std::size_t dim) {
  Matrix m(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(dim));
  if (!values.empty()) std::memcpy(m.data(), values.data(), values.size() * sizeof(float));
  return EmbeddingTablef(std::move(ids), std::move(m));
}

void check_record(std::unordered_set<std::string>& seen, const std::string& id, const float* v, std::size_t dim) {
  if (id.empty()) throw Error("embedding record with empty id");
  if (!seen.insert(id).second) throw Error("duplicate embedding id " + id);
  for (std::size_t i = 0; i < dim; ++i)
    if (!std::isfinite(v[i])) throw Error("non-finite embedding value for id " + id);
}

}  // namespace

EmbeddingTablef read_embeddings_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kBinaryMagic, 4) != 0) throw Error("missing NBEM magic");
  const auto version = read_le<std::uint8_t>(in, "version");
  if (version != kBinaryVersion) throw Error("unsupported embedding format version " + std::to_string(version));
  const auto dim = read_le<std::uint32_t>(in, "dim");
  const auto count = read_le<std::uint64_t>(in, "count");
  if (dim == 0) throw Error("embedding dimension must be positive");
  std::vector<std::string> ids;
  std::vector<float> values;
  std::unordered_set<std::string> seen;
  ids.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto id_len = read_le<std::uint16_t>(in, "id length");
    std::string id(id_len, '\0');
    if (!in.read(id.data(), id_len)) throw Error("truncated embedding file in record " + std::to_string(r));
    const std::size_t offset = values.size();
    values.resize(offset + dim);
    for (std::uint32_t i = 0; i < dim; ++i) {
      if (!in) throw Error("truncated embedding file for id " + id);
      values[offset + i] = read_le<float>(in, "vector");
    }
    check_record(seen, id, values.data() + offset, dim);
    ids.push_back(std::move(id));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error("trailing bytes after embedding records");
  return build(std::move(ids), std::move(values), dim);
}

EmbeddingTablef read_embeddings_tsv(std::istream& in) {
  std::vector<std::string> ids;
  std::vector<float> values;
  std::unordered_set<std::string> seen;
  std::size_t dim = 0;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected id<TAB>values", number);
    std::string id = line.substr(0, tab);
    const std::size_t offset = values.size();
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    std::size_t parsed = 0;
    while (true) {
      float v = 0.0f;
      auto [ptr, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || ptr == p) throw ParseError("malformed value for id " + id, number);
      values.push_back(v);
      ++parsed;
      p = ptr;
      if (p == end) break;
      if (*p != ',') throw ParseError("malformed value for id " + id, number);
      ++p;
    }
    if (dim == 0) dim = parsed;
    if (parsed != dim)
      throw ParseError("id " + id + " has " + std::to_string(parsed) + " values, expected " + std::to_string(dim),
                       number);
    check_record(seen, id, values.data() + offset, dim);
    ids.push_back(std::move(id));
  }
  if (dim == 0) throw Error("empty TSV embedding file");
  return build(std::move(ids), std::move(values), dim);
}

EmbeddingTablef read_embeddings(std::istream& in) {
  char head[4] = {0, 0, 0, 0};
  in.read(head, 4);
  const auto got = in.gcount();
  in.clear();
  in.seekg(0);
  if (got == 4 && std::memcmp(head, kBinaryMagic, 4) == 0) return read_embeddings_binary(in);
  return read_embeddings_tsv(in);
}

EmbeddingTablef load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embeddings file " + path.string());
  try {
    return read_embeddings(in);
  } catch (const CoverageError&) {
    throw;
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_embeddings_binary(const EmbeddingTablef& table, std::ostream& out) {
  out.write(kBinaryMagic, 4);
  write_le<std::uint8_t>(out, kBinaryVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(table.dim()));
  write_le<std::uint64_t>(out, table.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto& id = table.ids()[r];
    if (id.size() > 0xFFFF) throw Error("embedding id too long: " + id);
    write_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (Eigen::Index c = 0; c < table.dim(); ++c) write_le<float>(out, table.matrix()(static_cast<Eigen::Index>(r), c));
  }
  if (!out) throw Error("write failure");
}

void write_embeddings_tsv(const EmbeddingTablef& table, std::ostream& out) {
  std::array<char, 64> buf{};
  for (std::size_t r = 0; r < table.size(); ++r) {
    out << table.ids()[r] << '\t';
    for (Eigen::Index c = 0; c < table.dim(); ++c) {
      if (c) out << ',';
      auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), table.matrix()(static_cast<Eigen::Index>(r), c));
      out.write(buf.data(), ptr - buf.data());
    }
    out << '\n';
  }
  if (!out) throw Error("write failure");
}

}  // namespace newsxlt
