#pragma once

// Minimal CSV writer with locale-independent, shortest round-trip number
// formatting, so identical inputs always produce identical bytes.

#include <charconv>
#include <concepts>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <type_traits>

#include "platoon/errors.hpp"

namespace platoon {

inline void append_field(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

template <std::integral T>
  requires(!std::same_as<T, bool> && !std::same_as<T, char>)
inline void append_field(std::string& out, T v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void append_field(std::string& out, bool v) { out.push_back(v ? '1' : '0'); }
inline void append_field(std::string& out, std::string_view v) { out.append(v); }
inline void append_field(std::string& out, const char* v) { out.append(v); }
inline void append_field(std::string& out, const std::string& v) { out.append(v); }

inline std::string format_number(double v) {
  std::string s;
  append_field(s, v);
  return s;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw DomainError("cannot open for writing: " + path.string());
    std::string line;
    bool first = true;
    for (std::string_view h : header) {
      if (!first) line.push_back(',');
      line.append(h);
      first = false;
    }
    line.push_back('\n');
    out_ << line;
  }

  template <typename... Fields>
  void row(const Fields&... fields) {
    line_.clear();
    bool first = true;
    ((first ? (void)(first = false) : line_.push_back(','), append_field(line_, fields)), ...);
    line_.push_back('\n');
    out_ << line_;
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::string line_;
};

}  // namespace platoon
