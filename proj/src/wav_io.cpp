#include "pcgdn/wav_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <vector>

#include "pcgdn/errors.hpp"

namespace pcgdn {

namespace {

constexpr uint16_t kFormatPcm = 0x0001;
constexpr uint16_t kFormatIeeeFloat = 0x0003;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t read_u16(const uint8_t* p) { return static_cast<uint16_t>(p[0] | (p[1] << 8)); }

uint32_t read_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

float read_f32(const uint8_t* p) {
    uint32_t bits = read_u32(p);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 24) & 0xFF));
}

struct FmtInfo {
    uint16_t format = 0;
    uint16_t channels = 0;
    uint32_t sample_rate = 0;
    uint16_t bits_per_sample = 0;
};

double decode_sample(const uint8_t* p, const FmtInfo& fmt) {
    switch (fmt.bits_per_sample) {
        case 8: // unsigned in WAV
            return (static_cast<int>(p[0]) - 128) / 128.0;
        case 16:
            return static_cast<int16_t>(read_u16(p)) / 32768.0;
        case 24: {
            int32_t v = static_cast<int32_t>((static_cast<uint32_t>(p[0]) << 8) |
                                             (static_cast<uint32_t>(p[1]) << 16) |
                                             (static_cast<uint32_t>(p[2]) << 24)) >>
                        8;
            return v / 8388608.0;
        }
        case 32:
            return static_cast<double>(read_f32(p));
        default:
            throw UnsupportedError("unsupported bit depth: " + std::to_string(fmt.bits_per_sample));
    }
}

} // namespace

Waveform read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open WAV file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw FormatError("not a RIFF/WAVE file: " + path);
    }

    FmtInfo fmt;
    bool have_fmt = false;
    const uint8_t* data = nullptr;
    size_t data_size = 0;

    size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
        const size_t body = pos + 8;
        if (body + chunk_size > bytes.size()) throw FormatError("truncated chunk in " + path);

        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw FormatError("fmt chunk too small in " + path);
            const uint8_t* p = bytes.data() + body;
            fmt.format = read_u16(p);
            fmt.channels = read_u16(p + 2);
            fmt.sample_rate = read_u32(p + 4);
            fmt.bits_per_sample = read_u16(p + 14);
            if (fmt.format == kFormatExtensible) {
                if (chunk_size < 40) throw FormatError("extensible fmt chunk too small in " + path);
                fmt.format = read_u16(p + 24); // first two bytes of the sub-format GUID
            }
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = chunk_size;
        }
        pos = body + chunk_size + (chunk_size & 1); // chunks are 2-byte aligned
    }

    if (!have_fmt) throw FormatError("missing fmt chunk: " + path);
    if (data == nullptr) throw FormatError("missing data chunk: " + path);
    if (fmt.channels == 0 || fmt.sample_rate == 0) throw FormatError("bad fmt chunk: " + path);

    if (fmt.format == kFormatPcm) {
        if (fmt.bits_per_sample != 8 && fmt.bits_per_sample != 16 && fmt.bits_per_sample != 24)
            throw UnsupportedError("unsupported PCM bit depth in " + path);
    } else if (fmt.format == kFormatIeeeFloat) {
        if (fmt.bits_per_sample != 32) throw UnsupportedError("unsupported float bit depth in " + path);
    } else {
        throw UnsupportedError("unsupported (non-PCM) WAV codec in " + path);
    }

    const size_t bytes_per_sample = fmt.bits_per_sample / 8;
    const size_t frame_bytes = bytes_per_sample * fmt.channels;
    if (frame_bytes == 0 || data_size % frame_bytes != 0)
        throw FormatError("data chunk not a whole number of frames: " + path);
    const size_t frames = data_size / frame_bytes;

    Waveform w;
    w.sample_rate_hz = static_cast<int>(fmt.sample_rate);
    w.samples.resize(frames);
    const double inv_ch = fmt.channels > 0 ? 1.0 / fmt.channels : 0.0;
    for (size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        const uint8_t* fp = data + i * frame_bytes;
        for (int c = 0; c < fmt.channels; ++c) acc += decode_sample(fp + c * bytes_per_sample, fmt);
        w.samples[i] = acc * inv_ch;
    }
    return w;
}

void write_wav(const Waveform& w, const std::string& path) {
    bool clipped = false;
    const size_t n = w.samples.size();

    std::vector<uint8_t> out;
    out.reserve(44 + 2 * n);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32(out, static_cast<uint32_t>(36 + 2 * n));
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    put_u32(out, 16);
    put_u16(out, kFormatPcm);
    put_u16(out, 1); // mono
    put_u32(out, static_cast<uint32_t>(w.sample_rate_hz));
    put_u32(out, static_cast<uint32_t>(w.sample_rate_hz) * 2); // byte rate
    put_u16(out, 2);                                           // block align
    put_u16(out, 16);                                          // bits per sample
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32(out, static_cast<uint32_t>(2 * n));

    for (const double s : w.samples) {
        double v = s;
        if (v > 1.0 || v < -1.0) {
            clipped = true;
            v = std::clamp(v, -1.0, 1.0);
        }
        const long q = std::lround(v * 32768.0);
        put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(std::clamp(q, -32768L, 32767L))));
    }

    if (clipped) std::cerr << "write_wav: clipped samples outside [-1, 1] in " << path << "\n";

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("short write: " + path);
}

} // namespace pcgdn
