#pragma once

#include <vector>

namespace qmuse {

// One monophonic note: MIDI pitch, duration in milliseconds, velocity.
struct NoteEvent {
  int pitch = 60;
  double duration_ms = 500.0;
  int velocity = 64;

  bool operator==(const NoteEvent&) const = default;
};

struct Tune {
  double tempo_bpm = 120.0;
  std::vector<NoteEvent> notes;
};

}  // namespace qmuse
