#include "qmuse/sequencer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qmuse/config.hpp"

namespace qmuse::seq {

namespace {

std::size_t alphabet_index(const std::vector<int>& alphabet, int value) {
  const auto it = std::find(alphabet.begin(), alphabet.end(), value);
  return static_cast<std::size_t>(it - alphabet.begin());
}

void check_note(const NoteEvent& note) {
  if (note.pitch < 0 || note.pitch > 127) {
    throw std::invalid_argument("pitch outside MIDI range 0..127");
  }
  if (!(note.duration_ms > 0.0)) {
    throw std::invalid_argument("note duration must be positive");
  }
  if (note.velocity < 1 || note.velocity > 127) {
    throw std::invalid_argument("velocity outside 1..127");
  }
}

}  // namespace

Features extract_features(const std::vector<NoteEvent>& notes) {
  if (notes.empty()) throw std::invalid_argument("cannot analyze an empty tune");
  Features f;
  f.pitch.reserve(notes.size());
  f.duration.reserve(notes.size());
  f.loudness.reserve(notes.size());
  for (const NoteEvent& note : notes) {
    check_note(note);
    f.pitch.push_back(note.pitch);
    f.duration.push_back(static_cast<int>(std::llround(note.duration_ms)));
    f.loudness.push_back(note.velocity);
  }
  return f;
}

FeatureTrack reduce_alphabet(const std::vector<int>& raw) {
  if (raw.empty()) throw std::invalid_argument("cannot reduce an empty list");
  FeatureTrack track;
  track.raw = raw;
  for (int value : raw) {
    if (track.alphabet.size() >= 4) break;
    if (std::find(track.alphabet.begin(), track.alphabet.end(), value) ==
        track.alphabet.end()) {
      track.alphabet.push_back(value);
    }
  }
  for (int value : raw) {
    if (std::find(track.alphabet.begin(), track.alphabet.end(), value) !=
        track.alphabet.end()) {
      track.reduced.push_back(value);
    }
  }
  return track;
}

Counts count_transitions(const FeatureTrack& track) {
  if (track.reduced.size() < 2) {
    throw std::invalid_argument("need at least 2 reduced elements to count transitions");
  }
  Counts counts{};
  for (std::size_t t = 0; t + 1 < track.reduced.size(); ++t) {
    const std::size_t i = alphabet_index(track.alphabet, track.reduced[t]);
    const std::size_t j = alphabet_index(track.alphabet, track.reduced[t + 1]);
    ++counts[i][j];
  }
  return counts;
}

Counts pad_missing_symbols(Counts counts, std::size_t n_symbols) {
  for (std::size_t m = n_symbols; m < 4; ++m) counts[m][m] = 1;
  return counts;
}

SinkhornResult to_bistochastic(const Counts& counts, const SinkhornOptions& options) {
  if (!(options.epsilon > 0.0)) {
    throw std::invalid_argument("sinkhorn epsilon must be positive");
  }
  for (const auto& row : counts) {
    for (int c : row) {
      if (c < 0) throw std::invalid_argument("transition counts must be non-negative");
    }
  }

  qc::Mat4 m{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m[i][j] = counts[i][j] + options.epsilon;
  }

  const auto deviation = [&m]() {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      double row = 0.0;
      double col = 0.0;
      for (int j = 0; j < 4; ++j) {
        row += m[i][j];
        col += m[j][i];
      }
      worst = std::max({worst, std::abs(row - 1.0), std::abs(col - 1.0)});
    }
    return worst;
  };

  int iter = 0;
  double dev = deviation();
  while (dev > options.tol && iter < options.max_iter) {
    for (int i = 0; i < 4; ++i) {
      double row = 0.0;
      for (int j = 0; j < 4; ++j) row += m[i][j];
      for (int j = 0; j < 4; ++j) m[i][j] /= row;
    }
    for (int j = 0; j < 4; ++j) {
      double col = 0.0;
      for (int i = 0; i < 4; ++i) col += m[i][j];
      for (int i = 0; i < 4; ++i) m[i][j] /= col;
    }
    ++iter;
    dev = deviation();
  }

  if (dev > 1e-6) {
    throw std::runtime_error("sinkhorn balancing failed to converge (deviation " +
                             std::to_string(dev) + ")");
  }
  return SinkhornResult{m, dev, iter};
}

qc::Mat4 build_transition_gate(const std::array<double, 6>& angles) {
  return qc::compose_givens(angles);
}

TransitionModel build_model(const FeatureTrack& track,
                            const SinkhornOptions& sinkhorn_options,
                            const FitOptions& fit_options) {
  TransitionModel model;
  model.alphabet = track.alphabet;
  model.counts = pad_missing_symbols(count_transitions(track), track.alphabet.size());
  const SinkhornResult balanced = to_bistochastic(model.counts, sinkhorn_options);
  model.bistochastic = balanced.matrix;
  model.sinkhorn_deviation = balanced.deviation;
  model.sinkhorn_iterations = balanced.iterations;
  const FitResult fit = fit_rotation_angles(model.bistochastic, fit_options);
  model.angles = fit.angles;
  model.residual = fit.residual;
  model.gate = build_transition_gate(fit.angles);
  return model;
}

NoteVocabulary NoteVocabulary::defaults() {
  NoteVocabulary vocab;
  vocab.pitch_sets = {{
      {60, 62, 65, 67},  // set A: C4 D4 F4 G4
      {58, 60, 63, 65},  // set B: Bb3 C4 Eb4 F4
      {67, 68, 70, 72},  // set C: G4 Ab4 Bb4 C5
      {55, 57, 58, 60},  // set D: G3 A3 Bb3 C4
  }};
  vocab.duration_beats = {0.5, 1.0, 2.0, 3.0};
  vocab.tempo_bpm = 120.0;
  vocab.velocity = 96;
  return vocab;
}

NoteVocabulary NoteVocabulary::load(const std::string& path) {
  const config::KeyValueFile kv = config::KeyValueFile::load(path);
  NoteVocabulary vocab = defaults();
  const char* set_keys[4] = {"set_a", "set_b", "set_c", "set_d"};
  for (int s = 0; s < 4; ++s) {
    if (kv.has(set_keys[s])) {
      const auto vals = kv.numbers(set_keys[s], 4);
      for (int i = 0; i < 4; ++i) {
        vocab.pitch_sets[s][i] = static_cast<int>(std::llround(vals[i]));
      }
    }
  }
  if (kv.has("duration_beats")) {
    const auto vals = kv.numbers("duration_beats", 4);
    for (int i = 0; i < 4; ++i) vocab.duration_beats[i] = vals[i];
  }
  if (kv.has("tempo")) vocab.tempo_bpm = kv.number("tempo");
  if (kv.has("velocity")) {
    vocab.velocity = static_cast<int>(std::llround(kv.number("velocity")));
  }
  try {
    vocab.validate();
  } catch (const std::invalid_argument& e) {
    throw config::ParseError(path, 0, e.what());
  }
  return vocab;
}

void NoteVocabulary::validate() const {
  for (const auto& set : pitch_sets) {
    for (int pitch : set) {
      if (pitch < 0 || pitch > 127) {
        throw std::invalid_argument("vocabulary pitch outside MIDI range 0..127");
      }
    }
  }
  for (double beats : duration_beats) {
    if (!(beats > 0.0)) throw std::invalid_argument("duration beats must be positive");
  }
  if (!(tempo_bpm > 0.0)) throw std::invalid_argument("tempo must be positive");
  if (velocity < 1 || velocity > 127) {
    throw std::invalid_argument("velocity outside 1..127");
  }
}

NoteEvent decode_note(const qc::MeasurementRecord& c, const NoteVocabulary& vocab) {
  if (c.size() != 6) throw std::invalid_argument("note codes have 6 bits");
  const int set_index = 2 * c.c(0) + c.c(1);
  const int pitch_index = 2 * c.c(4) + c.c(5);
  const int duration_index = 2 * c.c(2) + c.c(3);

  NoteEvent note;
  note.pitch = vocab.pitch_sets[static_cast<std::size_t>(set_index)]
                               [static_cast<std::size_t>(pitch_index)];
  note.duration_ms =
      vocab.duration_beats[static_cast<std::size_t>(duration_index)] * 60000.0 /
      vocab.tempo_bpm;
  note.velocity = vocab.velocity;
  return note;
}

Arming arming_from_string(const std::string& name) {
  if (name == "swapped") return Arming::swapped;
  if (name == "direct") return Arming::direct;
  throw std::invalid_argument("arming must be 'swapped' or 'direct'");
}

std::string to_string(Arming arming) {
  return arming == Arming::swapped ? "swapped" : "direct";
}

GenerationResult generate_sequence(const std::array<TransitionModel, 3>& models,
                                   const NoteVocabulary& vocab, std::size_t n_notes,
                                   backend::QuantumBackend& backend, Arming arming) {
  if (n_notes < 1) throw std::invalid_argument("need at least one note to generate");
  vocab.validate();

  backend::TransitionSpec spec;
  for (std::size_t reg = 0; reg < 3; ++reg) spec.angles[reg] = models[reg].angles;

  GenerationResult result;
  result.notes.reserve(n_notes);
  result.rounds.reserve(n_notes);
  for (std::size_t round = 0; round < n_notes; ++round) {
    const auto records = backend.run_transition(spec, 1);
    const qc::MeasurementRecord& c = records.at(0);
    result.rounds.push_back(c);
    result.notes.push_back(decode_note(c, vocab));

    std::array<int, 6> armed{};
    for (std::size_t k = 0; k < 6; ++k) armed[k] = c.bits[k];
    if (arming == Arming::swapped) {
      std::swap(armed[0], armed[1]);
      std::swap(armed[2], armed[3]);
      std::swap(armed[4], armed[5]);
    }
    spec.armed_bits = armed;
  }
  return result;
}

void ClassicalTransitionTable::validate() const {
  if (symbols.empty() || probabilities.size() != symbols.size()) {
    throw std::invalid_argument("transition table must be square and non-empty");
  }
  for (const auto& row : probabilities) {
    if (row.size() != symbols.size()) {
      throw std::invalid_argument("transition table must be square");
    }
    double sum = 0.0;
    for (double p : row) {
      if (p < 0.0) throw std::invalid_argument("probabilities must be non-negative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 0.02) {
      throw std::invalid_argument("row probabilities must sum to 1 (within 0.02)");
    }
  }
}

std::vector<std::string> classical_generate(const ClassicalTransitionTable& table,
                                            const std::string& start, std::size_t n,
                                            Rng& rng) {
  table.validate();
  const auto it = std::find(table.symbols.begin(), table.symbols.end(), start);
  if (it == table.symbols.end()) {
    throw std::invalid_argument("unknown start symbol '" + start + "'");
  }
  std::size_t current = static_cast<std::size_t>(it - table.symbols.begin());

  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    const std::vector<double>& row = table.probabilities[current];
    double total = 0.0;
    for (double p : row) total += p;
    // Renormalize so printed rounding in the source table cannot leak
    // probability mass.
    const double u = rng.uniform01() * total;
    double cumulative = 0.0;
    std::size_t next = row.size() - 1;
    for (std::size_t j = 0; j < row.size(); ++j) {
      cumulative += row[j];
      if (u < cumulative) {
        next = j;
        break;
      }
    }
    out.push_back(table.symbols[next]);
    current = next;
  }
  return out;
}

}  // namespace qmuse::seq
