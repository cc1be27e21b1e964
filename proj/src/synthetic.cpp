#include "eazy/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace eazy {

namespace {

void validate(const SyntheticSpec& spec) {
  if (spec.blobs.empty()) throw DataError("synthetic spec needs >= 1 blob");
  const std::size_t d = spec.blobs.front().mean.size();
  for (const auto& blob : spec.blobs) {
    if (blob.mean.size() != d) throw DataError("blob means must share one dimension");
    if (blob.mean.empty()) throw DataError("blob mean must have dimension >= 1");
    if (!(blob.sigma > 0.0)) throw DataError("blob sigma must be > 0");
    if (blob.count < 1) throw DataError("blob count must be >= 1");
    if (blob.bonafide_fraction < 0.0 || blob.attack_fraction < 0.0 ||
        std::abs(blob.bonafide_fraction + blob.attack_fraction - 1.0) > 1e-9)
      throw DataError("blob label distribution must be nonnegative and sum to 1");
  }
  if (!spec.shift.empty() && spec.shift.size() != d)
    throw DataError("shift vector dimension mismatch");
}

}  // namespace

std::pair<LabeledDataset, std::vector<std::size_t>> generate_synthetic_with_origin(
    const SyntheticSpec& spec, std::uint64_t seed) {
  validate(spec);
  const std::size_t d = spec.blobs.front().mean.size();
  auto rng = make_rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<double> features;
  std::vector<Label> labels;
  std::vector<std::size_t> origins;
  for (std::size_t b = 0; b < spec.blobs.size(); ++b) {
    const auto& blob = spec.blobs[b];
    auto n_attack = static_cast<std::size_t>(
        std::llround(blob.attack_fraction * static_cast<double>(blob.count)));
    for (std::size_t i = 0; i < blob.count; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double shift = spec.shift.empty() ? 0.0 : spec.shift[j];
        features.push_back(csv_quantize(blob.mean[j] + shift + blob.sigma * unit(rng)));
      }
      labels.push_back(i < n_attack ? Label::Attack : Label::BonaFide);
      origins.push_back(b);
    }
  }

  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  LabeledDataset dataset(spec.name, d);
  dataset.reserve(order.size());
  std::vector<std::size_t> shuffled_origins(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::size_t i = order[k];
    dataset.add_row({features.data() + i * d, d}, labels[i]);
    shuffled_origins[k] = origins[i];
  }
  return {std::move(dataset), std::move(shuffled_origins)};
}

LabeledDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  return generate_synthetic_with_origin(spec, seed).first;
}

namespace {

BlobSpec blob(std::vector<double> mean, double sigma, std::size_t count,
              double attack_fraction) {
  BlobSpec b;
  b.mean = std::move(mean);
  b.sigma = sigma;
  b.count = count;
  b.attack_fraction = attack_fraction;
  b.bonafide_fraction = 1.0 - attack_fraction;
  return b;
}

}  // namespace

SyntheticSpec builtin_synthetic_spec(std::string_view name) {
  SyntheticSpec spec;
  spec.name = std::string(name);
  if (name == "single-blob") {
    spec.blobs = {blob({0.0, 0.0}, 1.0, 200, 0.5)};
  } else if (name == "two-blobs") {
    spec.blobs = {blob({0.0, 0.0}, 1.0, 100, 0.0), blob({10.0, 0.0}, 1.0, 100, 1.0)};
  } else if (name == "three-blobs") {
    spec.blobs = {blob({0.0, 0.0}, 1.0, 100, 0.0), blob({10.0, 0.0}, 1.0, 100, 1.0),
                  blob({5.0, 10.0 * 0.8660254037844386}, 1.0, 100, 0.5)};
  } else if (name == "three-blobs-shift") {
    spec = builtin_synthetic_spec("three-blobs");
    spec.name = std::string(name);
    spec.shift = {1.5, -1.0};
  } else if (name == "xor") {
    spec.blobs = {blob({0.0, 0.0}, 0.3, 50, 0.0), blob({4.0, 4.0}, 0.3, 50, 0.0),
                  blob({0.0, 4.0}, 0.3, 50, 1.0), blob({4.0, 0.0}, 0.3, 50, 1.0)};
  } else {
    throw DataError("unknown synthetic spec '" + std::string(name) + "'");
  }
  return spec;
}

std::vector<std::string> builtin_synthetic_names() {
  return {"single-blob", "two-blobs", "three-blobs", "three-blobs-shift", "xor"};
}

}  // namespace eazy
