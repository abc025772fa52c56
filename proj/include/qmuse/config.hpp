#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmuse::config {

// Thrown for malformed input files; message always carries file and line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what);

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// "key = v1 v2 ..." files: one key per line, '#' starts a comment, blank
// lines ignored. Values stay as strings; callers convert and validate.
class KeyValueFile {
 public:
  static KeyValueFile load(const std::string& path);
  static KeyValueFile parse(const std::string& text, const std::string& name);

  bool has(const std::string& key) const;
  const std::vector<std::string>& values(const std::string& key) const;

  // Single-value accessors; throw ParseError (with the defining line) on
  // missing keys, wrong arity, or failed conversion.
  double number(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, std::size_t count) const;

  const std::string& name() const { return name_; }
  const std::map<std::string, std::vector<std::string>>& entries() const {
    return entries_;
  }

 private:
  std::string name_;
  std::map<std::string, std::vector<std::string>> entries_;
  std::map<std::string, std::size_t> lines_;

  std::size_t line_of(const std::string& key) const;
};

}  // namespace qmuse::config
