#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace fv {

using i32 = std::int32_t;
using i64 = std::int64_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;

// All structured failures funnel through one exception family so callers can
// distinguish "bad input file" from "bad configuration" from "planner bug".
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {  // malformed input text/binary
public:
  using Error::Error;
};

class ShapeError : public Error {  // dimension mismatches
public:
  using Error::Error;
};

class ParamError : public Error {  // out-of-range or inconsistent parameters
public:
  using Error::Error;
};

class ConfigError : public Error {  // machine configuration rejected
public:
  using Error::Error;
};

class CompileError : public Error {  // plan not executable on the configured machine
public:
  using Error::Error;
};

class IoError : public Error {  // filesystem-level failure
public:
  using Error::Error;
};

inline i64 ceil_div(i64 a, i64 b) { return (a + b - 1) / b; }

// Product accumulation is defined as 32-bit two's-complement wraparound, the
// same arithmetic a fixed-width MAC array performs.  Both the reference
// implementations and the machine interpreters use this definition so results
// stay bit-identical even when intermediate sums exceed 31 bits.
inline i32 wrap_mul_add(i32 acc, i32 a, i32 b) {
  return static_cast<i32>(static_cast<u32>(acc) +
                          static_cast<u32>(a) * static_cast<u32>(b));
}

inline i32 wrap_add(i32 a, i32 b) {
  return static_cast<i32>(static_cast<u32>(a) + static_cast<u32>(b));
}

// Splitmix-style generator: tiny, fully specified here, identical on every
// platform.  Seeds never depend on global state.
class Rng {
public:
  explicit Rng(u64 seed) : state_(seed + 0x9e3779b97f4a7c15ull) {}

  u64 next_u64() {
    u64 z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound); bound > 0.
  u64 next_below(u64 bound) {
    // Rejection sampling keeps the distribution exact and deterministic.
    const u64 limit = std::numeric_limits<u64>::max() - std::numeric_limits<u64>::max() % bound;
    u64 x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  i64 next_in(i64 lo, i64 hi) {  // inclusive range
    return lo + static_cast<i64>(next_below(static_cast<u64>(hi - lo + 1)));
  }

  double next_real() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

private:
  u64 state_;
};

}  // namespace fv
