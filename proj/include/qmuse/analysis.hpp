#pragma once

#include <array>
#include <string>
#include <vector>

#include "qmuse/note.hpp"
#include "qmuse/sequencer.hpp"

namespace qmuse::seq {

// Every intermediate artifact of the qSeq analysis stage, in pitch,
// duration, loudness order.
struct TuneAnalysis {
  std::size_t note_count = 0;
  Features features;
  std::array<FeatureTrack, 3> tracks;
  std::array<TransitionModel, 3> models;
};

TuneAnalysis analyze_tune(const std::vector<NoteEvent>& notes,
                          const SinkhornOptions& sinkhorn_options = {},
                          const FitOptions& fit_options = {});

// Deterministic plain-text report: raw lists, alphabets, reduced lists,
// count matrices, bistochastic matrices, angles in radians and degrees,
// fit residuals.
std::string format_analysis(const TuneAnalysis& analysis);

}  // namespace qmuse::seq
