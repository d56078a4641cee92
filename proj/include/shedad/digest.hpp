#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <string_view>

namespace shedad {

/// FNV-1a 64-bit rolling hash, used to fingerprint inputs and configs for
/// cache keys and run manifests.  Not cryptographic; collision odds are
/// negligible at the scales involved.
struct Fnv1a64 {
    std::uint64_t value = 0xcbf29ce484222325ull;

    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            value ^= p[i];
            value *= 0x100000001b3ull;
        }
    }
    void update(std::string_view s) { update(s.data(), s.size()); }
    template <typename T>
    void update_pod(const T& v) { update(&v, sizeof(T)); }
};

inline std::uint64_t fnv1a64(std::string_view s) {
    Fnv1a64 h;
    h.update(s);
    return h.value;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace shedad
