#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "embscope/error.hpp"

namespace embscope::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string(), "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError(path.string(), "cannot write file");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw ValidationError(path.string(), "write failed");
}

/// Rewrites tokens that strict JSON cannot carry as finite doubles (`NaN`,
/// `Infinity`, `-Infinity`, and literals such as `1e999` that overflow) to
/// `null`, so the caller can report them by position instead of failing the
/// whole parse.
inline std::string null_out_non_finite(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  std::size_t i = 0;
  const auto starts_with = [&](std::string_view word) {
    return text.substr(i, word.size()) == word;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\\' && i + 1 < text.size()) {
        out.push_back(text[i + 1]);
        i += 2;
        continue;
      }
      if (c == '"') in_string = false;
      ++i;
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.push_back(c);
      ++i;
    } else if (starts_with("NaN") || starts_with("Infinity") || starts_with("-Infinity")) {
      out += "null";
      i += starts_with("NaN") ? 3 : (starts_with("Infinity") ? 8 : 9);
    } else if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i + 1;
      while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) ||
                                 text[j] == '.' || text[j] == 'e' || text[j] == 'E' ||
                                 text[j] == '+' || text[j] == '-')) {
        ++j;
      }
      const std::string token(text.substr(i, j - i));
      const double value = std::strtod(token.c_str(), nullptr);
      out += std::isfinite(value) ? token : std::string("null");
      i = j;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

/// Parses a JSON file; syntax and UTF-8 errors become ValidationError naming
/// the file.
inline json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(null_out_non_finite(text));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

/// Rounds to 6 significant decimal digits. Printing the result with the
/// shortest round-trip formatter yields at most 6 digits, and re-parsing it
/// gives back the identical double.
inline double quantize(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return std::strtod(buf, nullptr);
}

}  // namespace embscope::detail
