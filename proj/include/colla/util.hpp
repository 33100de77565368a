#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace colla {

// splitmix64: cheap seed mixer. All experiment randomness derives from the
// three named config seeds through this, so there is no global RNG state.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(splitmix64(a) ^ (0x2545f4914f6cdd1dULL * b));
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c) noexcept {
  return mix_seed(mix_seed(a, b), c);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Canonical float formatting for all emitted CSV/config files: 17 significant
// digits round-trip doubles exactly.
inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Run-scoped note collector. Notes end up in the run log file; they are kept
// out of the result CSVs so reruns stay byte-identical.
struct Log {
  std::vector<std::string> lines;
  bool echo = false;

  void note(const std::string& msg) {
    lines.push_back(msg);
    if (echo) std::fprintf(stderr, "[colla] %s\n", msg.c_str());
  }
};

}  // namespace colla
