#include "mvembed/embedding_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mvembed {

namespace {

constexpr std::array<char, 8> kMagic{'M', 'V', 'E', 'M', 'B', 'E', 'D', '1'};

void put_u32(std::ostream& out, std::uint32_t x) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint64_t get_le(std::istream& in, int bytes) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), bytes)) throw ParseError("<binary>", 0, "truncated embedding file");
  std::uint64_t x = 0;
  for (int i = bytes - 1; i >= 0; --i) x = (x << 8) | b[i];
  return x;
}

}  // namespace

void write_embedding_text(std::ostream& out, const EmbeddingTable& table) {
  out << table.size() << ' ' << table.dim << '\n';
  char buf[64];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.labels[i];
    for (double x : table.row(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
}

EmbeddingTable read_embedding_text(std::istream& in, const std::string& source) {
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  std::size_t count = 0;
  {
    std::istringstream header(line);
    if (!(header >> count >> table.dim)) throw ParseError(source, 1, "header must be '<nodes> <dim>'");
  }
  table.labels.reserve(count);
  table.values.reserve(count * table.dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string_view rest(line);
    auto space = rest.find(' ');
    if (space == std::string_view::npos) throw ParseError(source, line_no, "missing vector values");
    table.labels.emplace_back(rest.substr(0, space));
    rest.remove_prefix(space + 1);
    std::size_t got = 0;
    const char* p = rest.data();
    const char* end = rest.data() + rest.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double x = 0.0;
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc()) throw ParseError(source, line_no, "invalid number");
      table.values.push_back(x);
      ++got;
      p = next;
    }
    if (got != table.dim) {
      throw ParseError(source, line_no, "expected " + std::to_string(table.dim) + " values, got " + std::to_string(got));
    }
  }
  if (table.labels.size() != count) {
    throw ParseError(source, line_no, "header announced " + std::to_string(count) + " nodes, found " +
                                          std::to_string(table.labels.size()));
  }
  return table;
}

void write_embedding_binary(std::ostream& out, const EmbeddingTable& table) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(table.size()));
  put_u32(out, static_cast<std::uint32_t>(table.dim));
  for (std::size_t i = 0; i < table.size(); ++i) {
    put_u32(out, static_cast<std::uint32_t>(table.labels[i].size()));
    out.write(table.labels[i].data(), static_cast<std::streamsize>(table.labels[i].size()));
    for (double x : table.row(i)) put_f64(out, x);
  }
}

EmbeddingTable read_embedding_binary(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw ParseError("<binary>", 0, "bad magic");
  EmbeddingTable table;
  auto count = static_cast<std::size_t>(get_le(in, 4));
  table.dim = static_cast<std::size_t>(get_le(in, 4));
  table.labels.reserve(count);
  table.values.reserve(count * table.dim);
  for (std::size_t i = 0; i < count; ++i) {
    auto len = static_cast<std::size_t>(get_le(in, 4));
    std::string label(len, '\0');
    if (!in.read(label.data(), static_cast<std::streamsize>(len))) throw ParseError("<binary>", 0, "truncated label");
    table.labels.push_back(std::move(label));
    for (std::size_t k = 0; k < table.dim; ++k) table.values.push_back(std::bit_cast<double>(get_le(in, 8)));
  }
  return table;
}

void save_embedding(const std::filesystem::path& path, const EmbeddingTable& table) {
  const bool binary = path.extension() == ".bin";
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot write embedding file " + path.string());
  if (binary) {
    write_embedding_binary(out, table);
  } else {
    write_embedding_text(out, table);
  }
}

EmbeddingTable load_embedding(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embedding file " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  const bool binary = in.gcount() == 8 && magic == kMagic;
  in.clear();
  in.seekg(0);
  return binary ? read_embedding_binary(in) : read_embedding_text(in, path.string());
}

}  // namespace mvembed
