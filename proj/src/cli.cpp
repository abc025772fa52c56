#include "qmuse/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmuse/analysis.hpp"
#include "qmuse/backend.hpp"
#include "qmuse/client.hpp"
#include "qmuse/config.hpp"
#include "qmuse/hyperdie.hpp"
#include "qmuse/notation.hpp"
#include "qmuse/protocol.hpp"
#include "qmuse/sequencer.hpp"
#include "qmuse/server.hpp"
#include "qmuse/synth.hpp"

namespace qmuse::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitBackend = 3;
constexpr int kExitInternal = 4;

std::atomic<bool> g_stop_requested{false};

void handle_stop_signal(int) { g_stop_requested.store(true); }

// --seed wins; QMUSE_SEED is the only honored environment fallback;
// otherwise 0 (derive from entropy).
std::uint64_t resolve_seed_flag(bool seed_given, std::uint64_t seed_flag) {
  if (seed_given) return seed_flag;
  if (const char* env = std::getenv("QMUSE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("QMUSE_SEED is not an integer");
    }
  }
  return Rng::kEntropySeed;
}

struct BackendHandle {
  std::unique_ptr<backend::QuantumBackend> impl;
  std::uint64_t resolved_seed = 0;
  std::string description;
};

BackendHandle make_backend(const std::string& backend_flag, std::uint64_t seed) {
  BackendHandle handle;
  if (backend_flag == "local") {
    auto local = std::make_unique<backend::LocalBackend>(seed);
    handle.resolved_seed = local->seed();
    handle.impl = std::move(local);
    handle.description = "local";
  } else {
    auto remote =
        std::make_unique<net::RemoteBackend>(net::parse_endpoint(backend_flag), seed);
    handle.resolved_seed = remote->seed();
    handle.impl = std::move(remote);
    handle.description = backend_flag;
  }
  return handle;
}

json record_to_json(const qc::MeasurementRecord& record) { return json(record.bits); }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

int cmd_qsyn(std::size_t count, const std::string& bank_path, const std::string& out_dir,
             const std::string& backend_flag, std::uint64_t seed, double sample_rate) {
  const die::ParameterBank bank =
      bank_path.empty() ? die::ParameterBank::defaults() : die::ParameterBank::load(bank_path);
  BackendHandle backend = make_backend(backend_flag, seed);
  fs::create_directories(out_dir);

  json manifest;
  manifest["command"] = "qsyn";
  manifest["seed"] = backend.resolved_seed;
  manifest["backend"] = backend.description;
  manifest["bank"] = bank_path.empty() ? "default" : bank_path;
  manifest["count"] = count;
  manifest["sample_rate"] = sample_rate;
  manifest["die_invocations"] = 0;

  std::vector<die::SynthPatch> patches;
  json sounds = json::array();
  std::size_t die_invocations = 0;
  for (std::size_t i = 0; i < count; ++i) {
    // Two rolls per sound: C drives frequencies, D amplitudes/durations.
    const qc::MeasurementRecord c = backend.impl->run_hyperdie(1).at(0);
    const qc::MeasurementRecord d = backend.impl->run_hyperdie(1).at(0);
    die_invocations += 2;
    const die::SynthPatch patch = die::build_patch(c, d, bank);
    patches.push_back(patch);

    char name[32];
    std::snprintf(name, sizeof name, "sound_%03zu.wav", i + 1);
    const synth::SampleBuffer buffer = synth::render(patch, sample_rate);
    synth::write_wav(buffer, (fs::path(out_dir) / name).string());

    json sound;
    sound["file"] = name;
    sound["c_record"] = record_to_json(c);
    sound["d_record"] = record_to_json(d);
    json oscillators = json::array();
    for (const die::OscillatorParams& osc : patch.oscillators) {
      oscillators.push_back({{"freq_start", osc.freq_start},
                             {"freq_end", osc.freq_end},
                             {"amp_start", osc.amp_start},
                             {"amp_end", osc.amp_end}});
    }
    sound["oscillators"] = std::move(oscillators);
    sound["duration_s"] = patch.duration;
    sound["silence_after_s"] = patch.silence_after;
    sound["vibrato_rate_hz"] = patch.vibrato_rate;
    sounds.push_back(std::move(sound));
  }
  manifest["die_invocations"] = die_invocations;
  manifest["sounds"] = std::move(sounds);

  const synth::SampleBuffer sequence = synth::render_sequence(patches, sample_rate);
  synth::write_wav(sequence, (fs::path(out_dir) / "sequence.wav").string());
  manifest["sequence_file"] = "sequence.wav";
  manifest["sequence_samples"] = sequence.samples.size();

  write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << count << " sounds and sequence.wav to " << out_dir << "\n";
  return kExitOk;
}

struct QseqArtifacts {
  seq::TuneAnalysis analysis;
  seq::GenerationResult generation;
  seq::NoteVocabulary vocab;
};

QseqArtifacts run_qseq_pipeline(const std::string& in_path, std::size_t n_notes,
                                const std::string& vocab_path,
                                backend::QuantumBackend& backend, seq::Arming arming) {
  QseqArtifacts artifacts;
  const Tune tune = notation::read_notes(in_path);
  artifacts.analysis = seq::analyze_tune(tune.notes);
  artifacts.vocab = vocab_path.empty() ? seq::NoteVocabulary::defaults()
                                       : seq::NoteVocabulary::load(vocab_path);
  artifacts.generation = seq::generate_sequence(artifacts.analysis.models,
                                                artifacts.vocab, n_notes, backend, arming);
  return artifacts;
}

int cmd_qseq(const std::string& in_path, std::size_t n_notes, const std::string& out_path,
             const std::string& vocab_path, const std::string& backend_flag,
             std::uint64_t seed, const std::string& arming_flag) {
  const seq::Arming arming = seq::arming_from_string(arming_flag);
  BackendHandle backend = make_backend(backend_flag, seed);
  QseqArtifacts artifacts =
      run_qseq_pipeline(in_path, n_notes, vocab_path, *backend.impl, arming);

  Tune response;
  response.tempo_bpm = artifacts.vocab.tempo_bpm;
  response.notes = artifacts.generation.notes;
  if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  notation::write_midi(response, out_path);

  write_file(out_path + ".analysis.txt", seq::format_analysis(artifacts.analysis));

  json manifest;
  manifest["command"] = "qseq";
  manifest["input"] = in_path;
  manifest["seed"] = backend.resolved_seed;
  manifest["backend"] = backend.description;
  manifest["arming"] = seq::to_string(arming);
  manifest["notes"] = n_notes;
  manifest["vocabulary"] = vocab_path.empty() ? "default" : vocab_path;
  json rounds = json::array();
  for (const qc::MeasurementRecord& c : artifacts.generation.rounds) {
    rounds.push_back(record_to_json(c));
  }
  manifest["rounds"] = std::move(rounds);
  json notes = json::array();
  for (const NoteEvent& note : artifacts.generation.notes) {
    notes.push_back({{"pitch", note.pitch},
                     {"duration_ms", note.duration_ms},
                     {"velocity", note.velocity}});
  }
  manifest["generated_notes"] = std::move(notes);
  write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");

  std::cout << "wrote " << artifacts.generation.notes.size() << " notes to " << out_path
            << "\n";
  return kExitOk;
}

int cmd_analyze(const std::string& in_path, const std::string& out_path) {
  const Tune tune = notation::read_notes(in_path);
  const seq::TuneAnalysis analysis = seq::analyze_tune(tune.notes);
  const std::string dump = seq::format_analysis(analysis);
  if (out_path.empty()) {
    std::cout << dump;
  } else {
    write_file(out_path, dump);
  }
  return kExitOk;
}

int cmd_serve(std::uint16_t port, const std::string& bind_address) {
  net::BackendServer server(port, bind_address);
  server.start();
  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  std::cout << "listening on " << bind_address << ":" << server.port() << std::endl;
  while (!g_stop_requested.load()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  server.stop();
  std::cout << "stopped\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"quantum-driven sound synthesis and adaptive sequencing"};
  app.require_subcommand(1);

  std::string backend_flag = "local";
  std::uint64_t seed_flag = 0;

  // qsyn
  auto* qsyn = app.add_subcommand("qsyn", "roll the hyper-die and synthesize sounds");
  std::size_t qsyn_count = 4;
  std::string qsyn_bank;
  std::string qsyn_out = "qsyn_out";
  double qsyn_rate = 44100.0;
  qsyn->add_option("-n,--count", qsyn_count, "number of sounds")
      ->check(CLI::PositiveNumber);
  qsyn->add_option("--bank", qsyn_bank, "parameter bank file");
  qsyn->add_option("-o,--out", qsyn_out, "output directory");
  qsyn->add_option("--sample-rate", qsyn_rate, "output sample rate in Hz");
  auto* qsyn_seed = qsyn->add_option("--seed", seed_flag, "random seed (0 = entropy)");
  qsyn->add_option("--backend", backend_flag, "local or host:port");

  // qseq
  auto* qseq = app.add_subcommand("qseq", "respond to a tune with generated notes");
  std::string qseq_in;
  std::size_t qseq_notes = 20;
  std::string qseq_out = "response.mid";
  std::string qseq_vocab;
  std::string qseq_arming = "swapped";
  qseq->add_option("-i,--in", qseq_in, "input tune (.mid/.midi or text)")->required();
  qseq->add_option("-n,--notes", qseq_notes, "notes to generate")
      ->check(CLI::PositiveNumber);
  qseq->add_option("-o,--out", qseq_out, "output MIDI path");
  qseq->add_option("--vocab", qseq_vocab, "note vocabulary file");
  qseq->add_option("--arming", qseq_arming, "swapped or direct")
      ->check(CLI::IsMember({"swapped", "direct"}));
  auto* qseq_seed = qseq->add_option("--seed", seed_flag, "random seed (0 = entropy)");
  qseq->add_option("--backend", backend_flag, "local or host:port");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "dump the tune analysis");
  std::string analyze_in;
  std::string analyze_out;
  analyze->add_option("-i,--in", analyze_in, "input tune (.mid/.midi or text)")
      ->required();
  analyze->add_option("-o,--out", analyze_out, "write the dump here instead of stdout");

  // serve
  auto* serve = app.add_subcommand("serve", "run the circuit-execution service");
  std::uint16_t serve_port = 7453;
  std::string serve_bind = "127.0.0.1";
  serve->add_option("-p,--port", serve_port, "TCP port (0 = pick a free one)");
  serve->add_option("--bind", serve_bind, "bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (qsyn->parsed()) {
      const std::uint64_t seed = resolve_seed_flag(!qsyn_seed->empty(), seed_flag);
      return cmd_qsyn(qsyn_count, qsyn_bank, qsyn_out, backend_flag, seed, qsyn_rate);
    }
    if (qseq->parsed()) {
      const std::uint64_t seed = resolve_seed_flag(!qseq_seed->empty(), seed_flag);
      return cmd_qseq(qseq_in, qseq_notes, qseq_out, qseq_vocab, backend_flag, seed,
                      qseq_arming);
    }
    if (analyze->parsed()) return cmd_analyze(analyze_in, analyze_out);
    if (serve->parsed()) return cmd_serve(serve_port, serve_bind);
    return kExitUsage;
  } catch (const config::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const net::BackendError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const net::ProtocolError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace qmuse::cli
