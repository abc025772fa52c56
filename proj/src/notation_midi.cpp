#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmuse/notation.hpp"

namespace qmuse::notation {

namespace {

constexpr int kTicksPerQuarter = 480;
constexpr std::uint32_t kDefaultUsPerQuarter = 500000;  // 120 BPM

struct Cursor {
  const std::vector<std::uint8_t>* bytes;
  std::size_t at;
  std::size_t end;
  std::string path;

  std::uint8_t u8() {
    if (at >= end) throw std::runtime_error(path + ": truncated MIDI data");
    return (*bytes)[at++];
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>((u8() << 8) | u8()); }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
    return v;
  }
  std::uint32_t variable_length() {
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t byte = u8();
      value = (value << 7) | (byte & 0x7f);
      if ((byte & 0x80) == 0) return value;
    }
    throw std::runtime_error(path + ": variable-length quantity too long");
  }
  void skip(std::uint32_t n) {
    if (end - at < n) throw std::runtime_error(path + ": truncated MIDI data");
    at += n;
  }
  bool tag(const char* expected) {
    if (end - at < 4) return false;
    for (int i = 0; i < 4; ++i) {
      if ((*bytes)[at + static_cast<std::size_t>(i)] !=
          static_cast<std::uint8_t>(expected[i])) {
        return false;
      }
    }
    at += 4;
    return true;
  }
};

struct RawNoteEvent {
  std::uint64_t tick;
  std::size_t order;  // merge tiebreaker: file order
  bool on;
  int pitch;
  int velocity;
};

struct TempoChange {
  std::uint64_t tick;
  std::uint32_t us_per_quarter;
};

// Milliseconds at an absolute tick, integrating across tempo segments.
double tick_to_ms(std::uint64_t tick, const std::vector<TempoChange>& tempi,
                  int ticks_per_quarter) {
  double ms = 0.0;
  std::uint64_t segment_start = 0;
  std::uint32_t current = kDefaultUsPerQuarter;
  for (const TempoChange& change : tempi) {
    if (change.tick >= tick) break;
    ms += static_cast<double>(change.tick - segment_start) * current /
          (ticks_per_quarter * 1000.0);
    segment_start = change.tick;
    current = change.us_per_quarter;
  }
  ms += static_cast<double>(tick - segment_start) * current /
        (ticks_per_quarter * 1000.0);
  return ms;
}

void parse_track(Cursor& cur, std::vector<RawNoteEvent>& notes,
                 std::vector<TempoChange>& tempi, std::size_t& order) {
  if (!cur.tag("MTrk")) throw std::runtime_error(cur.path + ": expected MTrk chunk");
  const std::uint32_t length = cur.u32();
  const std::size_t track_end = cur.at + length;
  if (track_end > cur.end) throw std::runtime_error(cur.path + ": truncated track");

  std::uint64_t tick = 0;
  int running_status = -1;
  while (cur.at < track_end) {
    tick += cur.variable_length();
    std::uint8_t status;
    if ((*cur.bytes)[cur.at] & 0x80) {
      status = cur.u8();
    } else {
      if (running_status < 0) {
        throw std::runtime_error(cur.path + ": data byte without running status");
      }
      status = static_cast<std::uint8_t>(running_status);
    }

    if (status == 0xff) {
      running_status = -1;  // meta events cancel running status
      const std::uint8_t type = cur.u8();
      const std::uint32_t len = cur.variable_length();
      if (type == 0x51 && len == 3) {
        std::uint32_t us = 0;
        for (int i = 0; i < 3; ++i) us = (us << 8) | cur.u8();
        tempi.push_back(TempoChange{tick, us});
      } else {
        cur.skip(len);
        if (type == 0x2f) break;  // end of track
      }
    } else if (status == 0xf0 || status == 0xf7) {
      running_status = -1;
      cur.skip(cur.variable_length());
    } else if (status >= 0x80) {
      running_status = status;
      const int kind = status & 0xf0;
      if (kind == 0x90 || kind == 0x80) {
        const int pitch = cur.u8() & 0x7f;
        const int velocity = cur.u8() & 0x7f;
        const bool on = kind == 0x90 && velocity > 0;
        notes.push_back(RawNoteEvent{tick, order++, on, pitch, velocity});
      } else if (kind == 0xc0 || kind == 0xd0) {
        cur.skip(1);
      } else {
        cur.skip(2);  // polyphonic pressure, controller, pitch bend
      }
    } else {
      throw std::runtime_error(cur.path + ": unexpected status byte");
    }
  }
  cur.at = track_end;
}

void put_u16be(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
  }
}

void put_variable_length(std::vector<std::uint8_t>& out, std::uint32_t v) {
  std::uint8_t stack[5];
  int n = 0;
  do {
    stack[n++] = static_cast<std::uint8_t>(v & 0x7f);
    v >>= 7;
  } while (v != 0);
  while (n-- > 1) out.push_back(static_cast<std::uint8_t>(stack[n] | 0x80));
  out.push_back(stack[0]);
}

}  // namespace

Tune read_midi(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  Cursor cur{&bytes, 0, bytes.size(), path};

  if (!cur.tag("MThd")) throw std::runtime_error(path + ": not a MIDI file");
  if (cur.u32() != 6) throw std::runtime_error(path + ": bad header length");
  const std::uint16_t format = cur.u16();
  const std::uint16_t n_tracks = cur.u16();
  const std::uint16_t division = cur.u16();
  if (format > 1) throw std::runtime_error(path + ": only SMF formats 0 and 1 supported");
  if (division & 0x8000) {
    throw std::runtime_error(path + ": SMPTE time division not supported");
  }
  const int ticks_per_quarter = division;
  if (ticks_per_quarter == 0) throw std::runtime_error(path + ": zero time division");

  std::vector<RawNoteEvent> raw;
  std::vector<TempoChange> tempi;
  std::size_t order = 0;
  for (std::uint16_t t = 0; t < n_tracks; ++t) parse_track(cur, raw, tempi, order);

  std::stable_sort(tempi.begin(), tempi.end(),
                   [](const TempoChange& a, const TempoChange& b) { return a.tick < b.tick; });
  std::stable_sort(raw.begin(), raw.end(), [](const RawNoteEvent& a, const RawNoteEvent& b) {
    return a.tick != b.tick ? a.tick < b.tick : a.order < b.order;
  });

  Tune tune;
  tune.tempo_bpm = tempi.empty() ? 120.0 : 60000000.0 / tempi.front().us_per_quarter;

  const auto warn = [warnings](const std::string& message) {
    if (warnings) warnings->push_back(message);
  };

  // Monophonic extraction: one sounding note at a time; a fresh onset
  // truncates the previous note at its own start.
  bool sounding = false;
  RawNoteEvent current{};
  const auto finish = [&](std::uint64_t end_tick) {
    const double start_ms = tick_to_ms(current.tick, tempi, ticks_per_quarter);
    const double end_ms = tick_to_ms(end_tick, tempi, ticks_per_quarter);
    if (end_ms <= start_ms) {
      warn("zero-length note " + std::to_string(current.pitch) + " dropped");
      return;
    }
    tune.notes.push_back(NoteEvent{current.pitch, end_ms - start_ms, current.velocity});
  };

  for (const RawNoteEvent& event : raw) {
    if (event.on) {
      if (sounding) finish(event.tick);
      current = event;
      sounding = true;
    } else if (sounding && event.pitch == current.pitch) {
      finish(event.tick);
      sounding = false;
    }
  }
  if (sounding) {
    warn("note " + std::to_string(current.pitch) + " still sounding at end of track; dropped");
  }
  return tune;
}

void write_midi(const Tune& tune, const std::string& path) {
  if (!(tune.tempo_bpm > 0.0)) throw std::invalid_argument("tempo must be positive");
  const auto us_per_quarter =
      static_cast<std::uint32_t>(std::llround(60000000.0 / tune.tempo_bpm));
  const double ticks_per_ms = kTicksPerQuarter * tune.tempo_bpm / 60000.0;

  std::vector<std::uint8_t> track;
  put_variable_length(track, 0);
  track.insert(track.end(), {0xff, 0x51, 0x03});
  track.push_back(static_cast<std::uint8_t>((us_per_quarter >> 16) & 0xff));
  track.push_back(static_cast<std::uint8_t>((us_per_quarter >> 8) & 0xff));
  track.push_back(static_cast<std::uint8_t>(us_per_quarter & 0xff));

  for (const NoteEvent& note : tune.notes) {
    if (note.pitch < 0 || note.pitch > 127 || note.velocity < 1 || note.velocity > 127) {
      throw std::invalid_argument("note outside MIDI ranges");
    }
    const auto ticks = static_cast<std::uint32_t>(
        std::max<long long>(1, std::llround(note.duration_ms * ticks_per_ms)));
    put_variable_length(track, 0);
    track.insert(track.end(), {0x90, static_cast<std::uint8_t>(note.pitch),
                               static_cast<std::uint8_t>(note.velocity)});
    put_variable_length(track, ticks);
    track.insert(track.end(), {0x80, static_cast<std::uint8_t>(note.pitch), 0x40});
  }
  put_variable_length(track, 0);
  track.insert(track.end(), {0xff, 0x2f, 0x00});

  std::vector<std::uint8_t> bytes;
  bytes.insert(bytes.end(), {'M', 'T', 'h', 'd'});
  put_u32be(bytes, 6);
  put_u16be(bytes, 0);  // format 0
  put_u16be(bytes, 1);  // one track
  put_u16be(bytes, kTicksPerQuarter);
  bytes.insert(bytes.end(), {'M', 'T', 'r', 'k'});
  put_u32be(bytes, static_cast<std::uint32_t>(track.size()));
  bytes.insert(bytes.end(), track.begin(), track.end());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

Tune read_notes(const std::string& path, std::vector<std::string>* warnings) {
  const auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == "mid" || ext == "midi" || ext == "smf") return read_midi(path, warnings);
  return read_text(path);
}

}  // namespace qmuse::notation
