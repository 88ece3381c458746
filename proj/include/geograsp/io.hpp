#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "geograsp/geom.hpp"

namespace geograsp {

// Malformed input file. `offset` is the byte offset of the problem.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset);
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

// File missing, unreadable or unwritable.
class IoError : public Error {
 public:
  using Error::Error;
};

// Shortest round-trip decimal representation.
std::string format_double(double v);

void write_f32_le(std::ostream& out, float v);
// Reads `count` little-endian float32 values starting at the current position.
std::vector<float> read_f32_le(std::istream& in, std::size_t count, const char* what);

struct HeaderToken {
  std::string text;
  std::uint64_t offset = 0;
};

// Reads one '\n'-terminated header line and splits it on single spaces.
// Expects the first token to equal `magic` and exactly `fields` more tokens.
std::vector<HeaderToken> read_header(std::istream& in, const std::string& magic, std::size_t fields);

double parse_double(const HeaderToken& t);
long long parse_int(const HeaderToken& t);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace geograsp
