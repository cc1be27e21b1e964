#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "eazy/common.hpp"

namespace eazy {

// Binary class of one fingerprint sample: a genuine "live" presentation or
// a spoof ("attack") presentation.
enum class Label : std::uint8_t { BonaFide = 0, Attack = 1 };

// Sign encoding used by margin-based learners: Attack = +1, BonaFide = -1.
inline double label_sign(Label l) { return l == Label::Attack ? 1.0 : -1.0; }
// Decision value 0 maps to Attack (conservative boundary rule).
inline Label label_from_sign(double v) { return v < 0.0 ? Label::BonaFide : Label::Attack; }

const char* label_token(Label l);       // canonical token: "live" / "spoof"
Label parse_label_token(std::string token);  // case-insensitive, throws FormatError

// A feature matrix with one binary label per row. Rows are fixed-dimension
// real vectors, stored row-major. Immutable once built (construction goes
// through add_row, after which the dataset is shared read-only).
class LabeledDataset {
 public:
  LabeledDataset(std::string name, std::size_t dim);

  void add_row(std::span<const double> features, Label label);
  void reserve(std::size_t rows);

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return labels_.empty(); }
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  Label label(std::size_t i) const { return labels_[i]; }
  const std::vector<Label>& labels() const { return labels_; }

  std::size_t count(Label l) const;
  bool has_both_classes() const {
    return count(Label::BonaFide) > 0 && count(Label::Attack) > 0;
  }

  // Row-multiset selection; indices may repeat (bootstraps) and may be in
  // any order. Feature dimension is preserved.
  LabeledDataset subset(std::span<const std::size_t> rows, std::string name) const;
  // Column selection; used by random-subspace members.
  LabeledDataset project(std::span<const std::size_t> feature_indices,
                         std::string name) const;

 private:
  std::string name_;
  std::size_t dim_;
  std::vector<double> features_;
  std::vector<Label> labels_;
};

// Disjoint train/validation pair produced by stratified_split. train is the
// paper-style D, validation the hold-out V.
struct DataSplit {
  LabeledDataset train;
  LabeledDataset validation;
  double fraction = 0.0;
};

// Proportional per-class sampling without replacement, deterministic in
// seed. Per class, round(fraction * class_count) rows go to validation.
// Throws DataError for fraction outside (0,1), a class with < 2 rows, or a
// fraction so extreme that either side of the split would be empty.
DataSplit stratified_split(const LabeledDataset& dataset, double fraction,
                           std::uint64_t seed);

// CSV wire format: UTF-8, '\n' line endings, header "label,f0,...,f{d-1}",
// label tokens live/bonafide/spoof/attack/fake (case-insensitive), features
// in standard floating-point grammar. The writer emits canonical tokens
// (live/spoof) and features with 9 significant digits.
LabeledDataset load_dataset_csv(std::istream& in, std::string name);
void save_dataset_csv(const LabeledDataset& dataset, std::ostream& out);
LabeledDataset load_dataset_file(const std::string& path);
void save_dataset_file(const LabeledDataset& dataset, const std::string& path);

// Quantizes to the CSV wire precision (9 significant digits); values that
// went through this function round-trip the CSV format bit-exactly.
double csv_quantize(double v);

// Per-dimension z-score transform, fitted on training data only.
// Population (divide-by-N) variance convention. Dimensions whose standard
// deviation falls below sigma_floor are centered but left unscaled.
class Standardizer {
 public:
  static constexpr double kSigmaFloor = 1e-8;

  static Standardizer fit(const LabeledDataset& train);
  static Standardizer identity(std::size_t dim);
  // Reconstruction from stored parameters (model files).
  static Standardizer from_parameters(std::vector<double> means,
                                      std::vector<double> scales);

  LabeledDataset apply(const LabeledDataset& data) const;
  void apply_row(std::span<const double> in, std::span<double> out) const;
  std::vector<double> apply_row(std::span<const double> in) const;

  std::size_t dim() const { return means_.size(); }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& scales() const { return scales_; }

 private:
  std::vector<double> means_;
  std::vector<double> scales_;  // divisor per dimension; 1 for floored dims
};

}  // namespace eazy
