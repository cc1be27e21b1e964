#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "eazy/dataset.hpp"

namespace eazy {

// One isotropic Gaussian blob: `count` rows at N(mean, sigma^2 I) with the
// given class composition (fractions must be >= 0 and sum to 1).
struct BlobSpec {
  std::vector<double> mean;
  double sigma = 1.0;
  std::size_t count = 0;
  double bonafide_fraction = 1.0;
  double attack_fraction = 0.0;
};

struct SyntheticSpec {
  std::string name = "synthetic";
  std::vector<BlobSpec> blobs;
  // Constant offset added to every blob mean; models cross-sensor /
  // cross-dataset distribution shift between a train and a test draw.
  std::vector<double> shift;
};

// Deterministic in (spec, seed); rows are shuffled across blobs. Per blob the
// class counts are exact (round(fraction * count)). Features are quantized to
// the CSV wire precision so generated fixtures round-trip files bit-exactly.
LabeledDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

// Same rows plus the generating blob index per row (ground truth for
// clustering tests).
std::pair<LabeledDataset, std::vector<std::size_t>> generate_synthetic_with_origin(
    const SyntheticSpec& spec, std::uint64_t seed);

// Named fixtures for the CLI `synth` subcommand and the test suites:
//   single-blob        1 blob,  d=2, 200 rows, mixed labels
//   two-blobs          2 blobs, d=2, 10 sigma apart, one class each
//   three-blobs        3 blobs, d=2, mutual distance 10 sigma, 100 rows each
//   three-blobs-shift  three-blobs with a constant offset on all means
//   xor                4 tight blobs in the XOR layout (linearly inseparable)
SyntheticSpec builtin_synthetic_spec(std::string_view name);
std::vector<std::string> builtin_synthetic_names();

}  // namespace eazy
