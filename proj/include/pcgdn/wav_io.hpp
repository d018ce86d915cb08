#pragma once

#include <string>

#include "pcgdn/waveform.hpp"

namespace pcgdn {

// Reads a RIFF/WAVE PCM file (8/16/24-bit integer or 32-bit float).
// Multichannel input is averaged to mono; integer samples are scaled to
// [-1, 1] by the type's full-scale value.
// Throws FormatError on malformed/truncated files, UnsupportedError on
// non-PCM codecs, IoError if the file cannot be opened.
Waveform read_wav(const std::string& path);

// Writes a 16-bit PCM mono little-endian WAV. Samples outside [-1, 1] are
// clipped (a single warning per file goes to stderr). Readback error is at
// most one 16-bit quantization step per sample.
void write_wav(const Waveform& w, const std::string& path);

} // namespace pcgdn
