#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include "qdbn/errors.hpp"

namespace qdbn {

// FNV-1a, 64-bit. Stable fingerprint for provenance records and config
// digests; not cryptographic.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline std::string digest_hex(std::string_view bytes) { return hex64(fnv1a(bytes)); }

inline std::string file_digest_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for digest: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
    return hex64(h);
}

}  // namespace qdbn
