#pragma once

// Little-endian binary encode/decode helpers shared by the image and model
// container readers/writers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "smoe/errors.hpp"

namespace smoe::binio {

inline void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

inline void put_f32_span(std::string& out, const float* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) put_f32(out, v[i]);
}

// Cursor over an in-memory payload; every read is bounds-checked so a
// truncated file surfaces as format_error instead of UB.
struct Reader {
    const std::uint8_t* p = nullptr;
    std::size_t n = 0;
    std::size_t pos = 0;
    std::string what; // context for error messages

    void need(std::size_t bytes) const {
        if (pos + bytes > n)
            throw format_error(what + ": truncated at byte " + std::to_string(pos));
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    float f32() {
        const std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    void f32_span(float* out, std::size_t count) {
        need(count * 4);
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b)
                bits |= static_cast<std::uint32_t>(p[pos + 4 * i + b]) << (8 * b);
            std::memcpy(out + i, &bits, 4);
        }
        pos += count * 4;
    }
    std::string bytes(std::size_t count) {
        need(count);
        std::string s(reinterpret_cast<const char*>(p + pos), count);
        pos += count;
        return s;
    }
    bool done() const { return pos == n; }
};

} // namespace smoe::binio
