#include "geograsp/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace geograsp {

FormatError::FormatError(const std::string& what, std::uint64_t offset)
    : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_f32_le(std::ostream& out, float v) {
  static_assert(sizeof(float) == 4);
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(bytes, 4);
}

std::vector<float> read_f32_le(std::istream& in, std::size_t count, const char* what) {
  std::vector<float> values(count);
  std::vector<unsigned char> raw(count * 4);
  const auto start = static_cast<std::uint64_t>(in.tellg());
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  const auto got = static_cast<std::uint64_t>(in.gcount());
  if (got != raw.size())
    throw FormatError(std::string(what) + ": truncated payload, expected " +
                          std::to_string(raw.size()) + " bytes",
                      start + got);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(raw[4 * i + b]) << (8 * b);
    values[i] = std::bit_cast<float>(bits);
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError(std::string(what) + ": trailing bytes after payload", start + raw.size());
  return values;
}

std::vector<HeaderToken> read_header(std::istream& in, const std::string& magic,
                                     std::size_t fields) {
  std::string line;
  if (!std::getline(in, line) || in.eof())
    throw FormatError(magic + ": missing or unterminated header line", 0);
  std::vector<HeaderToken> tokens;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t next = line.find(' ', pos);
    tokens.push_back({line.substr(pos, next == std::string::npos ? std::string::npos : next - pos),
                      pos});
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (tokens.empty() || tokens[0].text != magic)
    throw FormatError("expected magic '" + magic + "'", 0);
  if (tokens.size() != fields + 1)
    throw FormatError(magic + ": expected " + std::to_string(fields) + " header fields, got " +
                          std::to_string(tokens.size() - 1),
                      line.size());
  return tokens;
}

double parse_double(const HeaderToken& t) {
  const std::string& s = t.text;
  const std::uint64_t offset = t.offset;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError("invalid number '" + s + "'", offset);
  return v;
}

long long parse_int(const HeaderToken& t) {
  const std::string& s = t.text;
  const std::uint64_t offset = t.offset;
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError("invalid integer '" + s + "'", offset);
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace geograsp
