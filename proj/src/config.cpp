#include "qmuse/config.hpp"

#include <fstream>
#include <sstream>

namespace qmuse::config {

namespace {

std::string strip(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

ParseError::ParseError(const std::string& file, std::size_t line, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
      file_(file),
      line_(line) {}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& name) {
  KeyValueFile kv;
  kv.name_ = name;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::string line = strip(raw);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(name, line_no, "expected 'key = values'");
    }
    const std::string key = strip(line.substr(0, eq));
    if (key.empty()) throw ParseError(name, line_no, "empty key");
    if (kv.entries_.count(key) != 0) {
      throw ParseError(name, line_no, "duplicate key '" + key + "'");
    }

    std::vector<std::string> values;
    std::istringstream rest(line.substr(eq + 1));
    std::string token;
    while (rest >> token) values.push_back(token);
    if (values.empty()) throw ParseError(name, line_no, "key '" + key + "' has no values");

    kv.entries_.emplace(key, std::move(values));
    kv.lines_.emplace(key, line_no);
  }
  return kv;
}

bool KeyValueFile::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

const std::vector<std::string>& KeyValueFile::values(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ParseError(name_, 0, "missing key '" + key + "'");
  }
  return it->second;
}

std::size_t KeyValueFile::line_of(const std::string& key) const {
  const auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

double KeyValueFile::number(const std::string& key) const {
  const auto& vals = values(key);
  if (vals.size() != 1) {
    throw ParseError(name_, line_of(key), "key '" + key + "' expects one value");
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(vals[0], &used);
    if (used != vals[0].size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(name_, line_of(key), "key '" + key + "' is not a number");
  }
}

std::vector<double> KeyValueFile::numbers(const std::string& key, std::size_t count) const {
  const auto& vals = values(key);
  if (vals.size() != count) {
    throw ParseError(name_, line_of(key),
                     "key '" + key + "' expects " + std::to_string(count) + " values");
  }
  std::vector<double> out;
  out.reserve(count);
  for (const std::string& token : vals) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ParseError(name_, line_of(key), "key '" + key + "' has a non-numeric value");
    }
  }
  return out;
}

}  // namespace qmuse::config
