#pragma once

namespace symtwirl {

inline constexpr const char* kVersion = "0.1.0";

// Pseudorandom stream identifier recorded in output metadata. Gaussian
// variates are produced by an explicit Box-Muller transform on top of
// mt19937_64 so that seeded runs reproduce bit-identically across platforms.
inline constexpr const char* kRngVersion = "mt19937_64-boxmuller-v1";

}  // namespace symtwirl
