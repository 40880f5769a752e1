#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mvembed {

// Dense node index, contiguous in [0, |U|).
using NodeId = std::uint32_t;
// Dense view index, contiguous in [0, |V|).
using ViewId = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Input that parses but violates a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inconsistent hyperparameters or model configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// API or CLI misuse (wrong variant for an operation, bad flag combination).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite value.
class TrainingError : public Error {
 public:
  TrainingError(std::size_t pair_index, const std::string& what)
      : Error("pair " + std::to_string(pair_index) + ": " + what), pair_index_(pair_index) {}
  std::size_t pair_index() const noexcept { return pair_index_; }

 private:
  std::size_t pair_index_;
};

// SplitMix64 finalizer; used to derive independent seeds from (seed, tag...) tuples.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) noexcept {
  return mix_seed(seed ^ mix_seed(a));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  return derive_seed(derive_seed(seed, a), b);
}

}  // namespace mvembed
