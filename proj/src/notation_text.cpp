#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qmuse/config.hpp"
#include "qmuse/notation.hpp"

namespace qmuse::notation {

namespace {

// Shortest decimal form that round-trips the double exactly.
std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::logic_error("double formatting failed");
  return std::string(buf, ptr);
}

}  // namespace

Tune read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config::ParseError(path, 0, "cannot open file");

  Tune tune;
  bool saw_note = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::string first;
    if (!(line >> first)) continue;

    if (first == "tempo") {
      if (saw_note) {
        throw config::ParseError(path, line_no, "tempo must precede the notes");
      }
      double bpm = 0.0;
      if (!(line >> bpm) || !(bpm > 0.0)) {
        throw config::ParseError(path, line_no, "tempo expects a positive number");
      }
      tune.tempo_bpm = bpm;
      continue;
    }

    NoteEvent note;
    std::istringstream fields(raw);
    std::string trailing;
    if (!(fields >> note.pitch >> note.duration_ms >> note.velocity) ||
        (fields >> trailing)) {
      throw config::ParseError(path, line_no,
                               "expected 'pitch duration_ms velocity'");
    }
    if (note.pitch < 0 || note.pitch > 127) {
      throw config::ParseError(path, line_no, "pitch outside 0..127");
    }
    if (!(note.duration_ms > 0.0)) {
      throw config::ParseError(path, line_no, "duration must be positive");
    }
    if (note.velocity < 1 || note.velocity > 127) {
      throw config::ParseError(path, line_no, "velocity outside 1..127");
    }
    tune.notes.push_back(note);
    saw_note = true;
  }
  return tune;
}

void write_text(const Tune& tune, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "tempo " << format_double(tune.tempo_bpm) << '\n';
  for (const NoteEvent& note : tune.notes) {
    out << note.pitch << ' ' << format_double(note.duration_ms) << ' '
        << note.velocity << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace qmuse::notation
