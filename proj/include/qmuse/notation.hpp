#pragma once

#include <string>
#include <vector>

#include "qmuse/note.hpp"

namespace qmuse::notation {

// Standard MIDI File, formats 0 and 1. Note-ons pair with matching offs
// (velocity-0 note-ons count as offs); a new onset truncates a sounding
// note; delta times convert to milliseconds via the tempo map (120 BPM
// when no tempo meta-event). Dropped events (e.g. a note still sounding at
// end of track) are reported through `warnings` when given.
Tune read_midi(const std::string& path, std::vector<std::string>* warnings = nullptr);

// SMF format 0, one track, channel 0, 480 ticks per quarter note.
void write_midi(const Tune& tune, const std::string& path);

// One note per line: "pitch duration_ms velocity". An optional "tempo N"
// line sets the BPM; '#' starts a comment. Lossless round-trip.
Tune read_text(const std::string& path);
void write_text(const Tune& tune, const std::string& path);

// Extension-based dispatch: .mid/.midi/.smf use the MIDI reader, anything
// else the text reader.
Tune read_notes(const std::string& path, std::vector<std::string>* warnings = nullptr);

}  // namespace qmuse::notation
