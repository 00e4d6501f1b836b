#pragma once

#include <string>
#include <vector>

namespace common {

// Minimal CSV with RFC-style quoting. Fields containing comma, quote or
// newline are quoted on write; quoted fields are unescaped on read.
std::string csv_escape(const std::string& field);
std::string csv_join(const std::vector<std::string>& fields);
std::vector<std::string> csv_split(const std::string& line);

// Splits a whole buffer into rows (handles quoted embedded newlines).
std::vector<std::vector<std::string>> csv_parse(const std::string& text);

// Fixed-precision float formatting (C locale, snprintf) so serialized
// artifacts are byte-stable.
std::string format_double(double v, int decimals);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::vector<unsigned char> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, const unsigned char* data, size_t n);

}  // namespace common
