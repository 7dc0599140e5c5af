#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclodsp/log.hpp"
#include "cyclodsp/signal.hpp"

namespace cyclodsp {

struct WavError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WavFileNotFound : WavError {
    using WavError::WavError;
};
struct WavMalformed : WavError {
    using WavError::WavError;
};
struct WavUnsupported : WavError {
    using WavError::WavError;
};

namespace detail {

inline std::uint32_t rd_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t rd_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

} // namespace detail

/// Reads a RIFF WAV file as a mono signal normalized to [-1, 1].
/// Supported encodings: PCM 16/24-bit and IEEE float 32-bit, mono or stereo.
/// Stereo files use channel 0 (a warning is emitted). Anything else is
/// rejected with a distinct error type.
inline Signal read_wav(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        throw WavFileNotFound("wav: file not found: " + path);
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw WavFileNotFound("wav: cannot open: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw WavMalformed("wav: not a RIFF/WAVE file: " + path);
    }

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    std::size_t data_off = 0, data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t sz = detail::rd_u32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + sz > bytes.size()) throw WavMalformed("wav: truncated chunk: " + path);
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (sz < 16) throw WavMalformed("wav: fmt chunk too small: " + path);
            format = detail::rd_u16(bytes.data() + body);
            channels = detail::rd_u16(bytes.data() + body + 2);
            rate = detail::rd_u32(bytes.data() + body + 4);
            bits = detail::rd_u16(bytes.data() + body + 14);
            if (format == 0xFFFE && sz >= 40) {
                // WAVE_FORMAT_EXTENSIBLE: first two bytes of the subformat
                // GUID carry the actual format tag.
                format = detail::rd_u16(bytes.data() + body + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_off = body;
            data_len = sz;
        }
        pos = body + sz + (sz & 1); // chunks are word-aligned
    }

    if (!have_fmt || data_off == 0) throw WavMalformed("wav: missing fmt or data chunk: " + path);
    if (channels == 0 || rate == 0) throw WavMalformed("wav: bad fmt fields: " + path);
    if (channels > 2) throw WavUnsupported("wav: only mono/stereo supported: " + path);

    const bool pcm16 = format == 1 && bits == 16;
    const bool pcm24 = format == 1 && bits == 24;
    const bool f32 = format == 3 && bits == 32;
    if (!pcm16 && !pcm24 && !f32) {
        throw WavUnsupported("wav: unsupported encoding (format=" + std::to_string(format) +
                             ", bits=" + std::to_string(bits) + "): " + path);
    }

    const std::size_t bytes_per_sample = bits / 8;
    const std::size_t frame_bytes = bytes_per_sample * channels;
    const std::size_t n = data_len / frame_bytes;
    if (n == 0) throw WavMalformed("wav: empty data chunk: " + path);

    if (channels == 2) {
        log_warn("wav: '" + path + "' is stereo; using channel 0");
    }

    std::vector<double> out(n);
    const unsigned char* d = bytes.data() + data_off;
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char* s = d + i * frame_bytes; // channel 0
        if (pcm16) {
            const std::int16_t v = static_cast<std::int16_t>(detail::rd_u16(s));
            out[i] = static_cast<double>(v) / 32768.0;
        } else if (pcm24) {
            std::int32_t v = static_cast<std::int32_t>(s[0]) | (static_cast<std::int32_t>(s[1]) << 8) |
                             (static_cast<std::int32_t>(s[2]) << 16);
            if (v & 0x800000) v |= ~0xFFFFFF; // sign extend
            out[i] = static_cast<double>(v) / 8388608.0;
        } else {
            float v;
            std::memcpy(&v, s, 4);
            out[i] = static_cast<double>(v);
        }
    }
    return Signal::from_real(out, static_cast<double>(rate));
}

/// Writes the real part of a signal as 16-bit PCM mono.
inline void write_wav(const std::string& path, const Signal& x) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw WavError("wav: cannot open for writing: " + path);
    const std::uint32_t n = static_cast<std::uint32_t>(x.size());
    const std::uint32_t data_bytes = n * 2;
    const std::uint32_t rate = static_cast<std::uint32_t>(x.sample_rate_hz);

    auto put_u32 = [&f](std::uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF), static_cast<unsigned char>((v >> 8) & 0xFF),
                              static_cast<unsigned char>((v >> 16) & 0xFF),
                              static_cast<unsigned char>((v >> 24) & 0xFF)};
        f.write(reinterpret_cast<char*>(b), 4);
    };
    auto put_u16 = [&f](std::uint16_t v) {
        unsigned char b[2] = {static_cast<unsigned char>(v & 0xFF), static_cast<unsigned char>((v >> 8) & 0xFF)};
        f.write(reinterpret_cast<char*>(b), 2);
    };

    f.write("RIFF", 4);
    put_u32(36 + data_bytes);
    f.write("WAVE", 4);
    f.write("fmt ", 4);
    put_u32(16);
    put_u16(1); // PCM
    put_u16(1); // mono
    put_u32(rate);
    put_u32(rate * 2);
    put_u16(2);
    put_u16(16);
    f.write("data", 4);
    put_u32(data_bytes);
    for (std::size_t i = 0; i < n; ++i) {
        double v = x.samples[i].real() * 32768.0;
        if (v > 32767.0) v = 32767.0;
        if (v < -32768.0) v = -32768.0;
        const std::int16_t q = static_cast<std::int16_t>(std::lround(v));
        put_u16(static_cast<std::uint16_t>(q));
    }
}

} // namespace cyclodsp
