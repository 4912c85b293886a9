#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coke {

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy. The CLI maps these onto process exit codes:
// ValidationError -> 2, BackendError -> 3, MetricError -> 4.
struct CokeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : CokeError {
  using CokeError::CokeError;
};

struct BackendError : CokeError {
  using CokeError::CokeError;
};

struct MetricError : CokeError {
  using CokeError::CokeError;
};

// --- deterministic hashing -------------------------------------------------
// std::hash is implementation-defined; everything that feeds seeds or
// manifests goes through these instead.

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h = kFnvOffset) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for one (story_id, aspect) pair, derived from the run-level seed.
inline std::uint64_t derive_pair_seed(std::uint64_t seed, std::string_view story_id,
                                      std::string_view aspect) {
  std::uint64_t h = fnv1a64_u64(seed);
  h = fnv1a64(story_id, h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(aspect, h);
  return splitmix64(h);
}

// --- deterministic RNG -----------------------------------------------------
// xoshiro256** with explicit double/int draws. The standard distributions are
// implementation-defined, which would break byte-identical reruns.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    for (auto& w : state_) {
      seed = splitmix64(seed);
      w = seed;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [0, n), n > 0
  std::uint64_t next_below(std::uint64_t n) {
    // rejection to avoid modulo bias
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // standard normal via Box-Muller
  double next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

// --- compensated summation ---------------------------------------------
// Kahan-Babuska accumulator; keeps metric kernel contracts honest at n ~ 1e5.
class KahanSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// --- small string helpers ----------------------------------------------

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& items, std::string_view sep);

// Reads a whole file; throws ValidationError if it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

// FNV-1a of a file's bytes, hex-encoded; used for manifest checksums.
std::string file_checksum_hex(const std::string& path);
std::string hex_u64(std::uint64_t v);

// Calls fn(line, line_number) for every line of a file; line numbers are
// 1-based. Skips a trailing empty line.
void for_each_line(const std::string& path,
                   const std::function<void(std::string_view, std::size_t)>& fn);

}  // namespace coke
