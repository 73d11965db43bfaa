#ifndef HYPERAUDIT_HASH_H_
#define HYPERAUDIT_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace hyperaudit {

// 64-bit FNV-1a. Stable across platforms, used for fingerprints and
// provenance tags, not for security.
std::uint64_t Fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

// Lower-case, zero-padded 16 character hex rendering.
std::string HexDigest(std::uint64_t value);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_HASH_H_
