#include "qmuse/analysis.hpp"

#include <cstdio>
#include <numbers>
#include <sstream>

namespace qmuse::seq {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void append_ints(std::ostringstream& out, const char* label,
                 const std::vector<int>& values) {
  out << label << ":";
  for (int v : values) out << ' ' << v;
  out << '\n';
}

}  // namespace

TuneAnalysis analyze_tune(const std::vector<NoteEvent>& notes,
                          const SinkhornOptions& sinkhorn_options,
                          const FitOptions& fit_options) {
  TuneAnalysis analysis;
  analysis.note_count = notes.size();
  analysis.features = extract_features(notes);
  const std::array<const std::vector<int>*, 3> raw = {
      &analysis.features.pitch, &analysis.features.duration,
      &analysis.features.loudness};
  for (std::size_t f = 0; f < 3; ++f) {
    analysis.tracks[f] = reduce_alphabet(*raw[f]);
    analysis.models[f] = build_model(analysis.tracks[f], sinkhorn_options, fit_options);
  }
  return analysis;
}

std::string format_analysis(const TuneAnalysis& analysis) {
  static const char* kNames[3] = {"pitch", "duration", "loudness"};
  std::ostringstream out;
  out << "tune analysis\n";
  out << "notes: " << analysis.note_count << "\n";

  for (std::size_t f = 0; f < 3; ++f) {
    const FeatureTrack& track = analysis.tracks[f];
    const TransitionModel& model = analysis.models[f];
    out << "\n[" << kNames[f] << "]\n";
    append_ints(out, "raw", track.raw);
    append_ints(out, "alphabet", track.alphabet);
    append_ints(out, "reduced", track.reduced);

    out << "counts:\n";
    for (const auto& row : model.counts) {
      out << " ";
      for (int c : row) out << ' ' << c;
      out << '\n';
    }
    if (track.alphabet.size() < 4) {
      out << "note: " << (4 - track.alphabet.size())
          << " missing symbol(s) padded with diagonal self-transitions\n";
    }

    out << "bistochastic:\n";
    for (const auto& row : model.bistochastic) {
      out << " ";
      for (double v : row) out << ' ' << fmt(v);
      out << '\n';
    }
    out << "sinkhorn: deviation " << fmt(model.sinkhorn_deviation) << " after "
        << model.sinkhorn_iterations << " iterations\n";

    out << "angles_rad:";
    for (double a : model.angles) out << ' ' << fmt(a);
    out << '\n';
    out << "angles_deg:";
    for (double a : model.angles) out << ' ' << fmt(a * 180.0 / std::numbers::pi);
    out << '\n';
    out << "fit_residual: " << fmt(model.residual) << '\n';
  }
  return out.str();
}

}  // namespace qmuse::seq
