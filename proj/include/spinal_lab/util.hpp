#pragma once

// Shared basics: the error type thrown across the library, a portable
// seeded RNG, the thread-count override, and float formatting for files.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace spinal_lab {

using VertexId = std::uint32_t;

inline constexpr const char* kVersion = "0.1.0";

/// Every failure carries a short machine-checkable kind ("SelfLoop",
/// "RadiusUnsafe", ...) next to the human-readable message.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

[[noreturn]] inline void fail(std::string kind, const std::string& message) {
  throw Error(std::move(kind), message);
}

/// mt19937_64 with hand-rolled bounded draws. std::uniform_int_distribution
/// is implementation-defined, so going through it would make seeded outputs
/// differ between standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) fail("DomainError", "Rng::below needs a positive bound");
    return next() % bound;
  }

  std::size_t index(std::size_t size) {
    return static_cast<std::size_t>(below(static_cast<std::uint64_t>(size)));
  }

  double unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

private:
  std::mt19937_64 eng_;
};

/// Worker count: SPINAL_LAB_THREADS when set (clamped to [1, 256]),
/// otherwise the hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("SPINAL_LAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(v > 256 ? 256 : v);
    return 1;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

/// Runs fn(i) for i in [0, count). Results must go into pre-sized
/// per-index slots so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  unsigned workers = thread_count();
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  if (workers > count) workers = static_cast<unsigned>(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// 17 significant digits: enough to round-trip any double exactly.
inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace spinal_lab
