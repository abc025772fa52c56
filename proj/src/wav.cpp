#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmuse/synth.hpp"

namespace qmuse::synth {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
  }
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(tag[i]));
}

std::uint16_t get_u16(const std::vector<std::uint8_t>& buf, std::size_t at) {
  return static_cast<std::uint16_t>(buf[at] | (buf[at + 1] << 8));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& buf, std::size_t at) {
  return static_cast<std::uint32_t>(buf[at]) |
         (static_cast<std::uint32_t>(buf[at + 1]) << 8) |
         (static_cast<std::uint32_t>(buf[at + 2]) << 16) |
         (static_cast<std::uint32_t>(buf[at + 3]) << 24);
}

bool tag_is(const std::vector<std::uint8_t>& buf, std::size_t at, const char* tag) {
  for (int i = 0; i < 4; ++i) {
    if (buf[at + static_cast<std::size_t>(i)] != static_cast<std::uint8_t>(tag[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace

void write_wav(const SampleBuffer& buffer, const std::string& path) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(buffer.samples.size() * 2);
  const auto sample_rate = static_cast<std::uint32_t>(std::llround(buffer.sample_rate));

  std::vector<std::uint8_t> bytes;
  bytes.reserve(44 + data_bytes);
  put_tag(bytes, "RIFF");
  put_u32(bytes, 36 + data_bytes);
  put_tag(bytes, "WAVE");
  put_tag(bytes, "fmt ");
  put_u32(bytes, 16);             // PCM fmt chunk size
  put_u16(bytes, 1);              // audio format: PCM
  put_u16(bytes, 1);              // channels: mono
  put_u32(bytes, sample_rate);
  put_u32(bytes, sample_rate * 2);  // byte rate
  put_u16(bytes, 2);              // block align
  put_u16(bytes, 16);             // bits per sample
  put_tag(bytes, "data");
  put_u32(bytes, data_bytes);

  for (double x : buffer.samples) {
    if (!(x >= -1.0 && x <= 1.0)) {
      throw std::domain_error("sample " + std::to_string(x) +
                              " not representable in 16-bit PCM");
    }
    const auto q = static_cast<std::int16_t>(std::llround(x * 32767.0));
    put_u16(bytes, static_cast<std::uint16_t>(q));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

SampleBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw std::runtime_error("not a RIFF/WAVE file: " + path);
  }

  SampleBuffer buffer;
  bool have_fmt = false;
  std::size_t at = 12;
  while (at + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = get_u32(bytes, at + 4);
    const std::size_t body = at + 8;
    if (body + chunk_size > bytes.size()) {
      throw std::runtime_error("truncated chunk in " + path);
    }
    if (tag_is(bytes, at, "fmt ")) {
      if (chunk_size < 16) throw std::runtime_error("short fmt chunk in " + path);
      if (get_u16(bytes, body) != 1 || get_u16(bytes, body + 2) != 1 ||
          get_u16(bytes, body + 14) != 16) {
        throw std::runtime_error("only PCM 16-bit mono is supported: " + path);
      }
      buffer.sample_rate = get_u32(bytes, body + 4);
      have_fmt = true;
    } else if (tag_is(bytes, at, "data")) {
      if (!have_fmt) throw std::runtime_error("data chunk before fmt in " + path);
      buffer.samples.reserve(chunk_size / 2);
      for (std::size_t i = 0; i + 1 < chunk_size; i += 2) {
        const auto q = static_cast<std::int16_t>(get_u16(bytes, body + i));
        buffer.samples.push_back(static_cast<double>(q) / 32767.0);
      }
      return buffer;
    }
    at = body + chunk_size + (chunk_size % 2);  // chunks are word-aligned
  }
  throw std::runtime_error("no data chunk in " + path);
}

}  // namespace qmuse::synth
