#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qmuse/backend.hpp"
#include "qmuse/note.hpp"
#include "qmuse/qcsim.hpp"
#include "qmuse/rng.hpp"

namespace qmuse::seq {

// The three per-note feature lists, in note order.
struct Features {
  std::vector<int> pitch;
  std::vector<int> duration;  // milliseconds
  std::vector<int> loudness;
};

Features extract_features(const std::vector<NoteEvent>& notes);

// alphabet = first <= 4 distinct raw values in first-occurrence order;
// reduced = raw filtered to alphabet members, order preserved.
struct FeatureTrack {
  std::vector<int> raw;
  std::vector<int> alphabet;
  std::vector<int> reduced;
};

FeatureTrack reduce_alphabet(const std::vector<int>& raw);

using Counts = std::array<std::array<int, 4>, 4>;

// counts[i][j] = occurrences of consecutive pair (alphabet[i], alphabet[j])
// in reduced. Rows/columns beyond the alphabet stay zero here; the model
// builder pads them. Requires at least 2 reduced elements.
Counts count_transitions(const FeatureTrack& track);

// Missing symbols (alphabet smaller than 4) get a diagonal self-transition
// count of 1 so Sinkhorn stays feasible on the full 4x4 shape.
Counts pad_missing_symbols(Counts counts, std::size_t n_symbols);

struct SinkhornOptions {
  double epsilon = 1e-3;  // additive smoothing before balancing
  double tol = 1e-10;     // target max |row/col sum - 1|
  int max_iter = 10000;
};

struct SinkhornResult {
  qc::Mat4 matrix;
  double deviation;  // achieved max |row/col sum - 1|
  int iterations;
};

// Sinkhorn-Knopp on (counts + epsilon). Throws if the deviation is still
// above 1e-6 after max_iter.
SinkhornResult to_bistochastic(const Counts& counts, const SinkhornOptions& options = {});

struct FitOptions {
  int restarts = 64;        // random starts besides theta = 0
  std::uint64_t seed = 1;   // start-point stream; 0 would mean entropy
};

struct FitResult {
  std::array<double, 6> angles;
  double residual;  // Frobenius norm of (gate entrywise squared) - B
};

// Minimize || (O(theta) entrywise squared) - B ||_F over the 6 Givens
// angles. Deterministic multi-start local descent; best result wins, ties
// broken by the lexicographically smaller angle vector.
FitResult fit_rotation_angles(const qc::Mat4& B, const FitOptions& options = {});

// The ordered Givens product G01*G02*G03*G12*G13*G23.
qc::Mat4 build_transition_gate(const std::array<double, 6>& angles);

struct TransitionModel {
  std::vector<int> alphabet;
  Counts counts{};  // includes diagonal padding when alphabet < 4
  qc::Mat4 bistochastic{};
  double sinkhorn_deviation = 0.0;
  int sinkhorn_iterations = 0;
  std::array<double, 6> angles{};
  double residual = 0.0;
  qc::Mat4 gate{};
};

TransitionModel build_model(const FeatureTrack& track,
                            const SinkhornOptions& sinkhorn_options = {},
                            const FitOptions& fit_options = {});

// Output note material: 4 pitch sets of 4 MIDI pitches (A..D), 4 durations
// in beats (eighth, quarter, half, dotted half), tempo and velocity.
struct NoteVocabulary {
  std::array<std::array<int, 4>, 4> pitch_sets;
  std::array<double, 4> duration_beats;
  double tempo_bpm = 120.0;
  int velocity = 96;

  static NoteVocabulary defaults();
  static NoteVocabulary load(const std::string& path);
  void validate() const;
};

// C = [c5 .. c0]: set = 2*c0 + c1, pitch index = 2*c4 + c5, duration
// index = 2*c2 + c3; all 64 codes decode.
NoteEvent decode_note(const qc::MeasurementRecord& c, const NoteVocabulary& vocab);

// Round t+1 arming. The swapped mode inverts consecutive measurement pairs
// (|c4>|c5>|c2>|c3>|c0>|c1>); direct arms with the bits as listed.
enum class Arming { swapped, direct };

Arming arming_from_string(const std::string& name);
std::string to_string(Arming arming);

struct GenerationResult {
  std::vector<NoteEvent> notes;
  std::vector<qc::MeasurementRecord> rounds;  // one 6-bit C per note
};

// Round 1 prepares H|0> on every qubit; later rounds arm each register
// from the previous measurements per the arming mode. Register X (bits
// c5 c4) runs the pitch model, Y (c3 c2) duration, Z (c1 c0) loudness.
GenerationResult generate_sequence(const std::array<TransitionModel, 3>& models,
                                   const NoteVocabulary& vocab, std::size_t n_notes,
                                   backend::QuantumBackend& backend,
                                   Arming arming = Arming::swapped);

// Classical row-stochastic baseline generator.
struct ClassicalTransitionTable {
  std::vector<std::string> symbols;
  std::vector<std::vector<double>> probabilities;

  // Square shape; rows sum to 1 within 0.02 (printed tables round).
  void validate() const;
};

std::vector<std::string> classical_generate(const ClassicalTransitionTable& table,
                                            const std::string& start, std::size_t n,
                                            Rng& rng);

}  // namespace qmuse::seq
