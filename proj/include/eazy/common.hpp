#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace eazy {

// Malformed input bytes: CSV, config files, model files.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Model file with an unsupported version tag.
class VersionError : public FormatError {
 public:
  explicit VersionError(const std::string& what) : FormatError(what) {}
};

// Structurally valid input that violates an operation's preconditions
// (dimension mismatch, degenerate split, single-class data, ...).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure inside an iterative solver.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Counter-mode seed derivation: one master seed plus a stream index yields
// an independent, reproducible child seed. Used everywhere a component
// needs its own RNG stream (per repeat, per cluster, per ensemble member).
// Mixing function is the splitmix64 finalizer over master + odd * (stream+1).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace eazy
