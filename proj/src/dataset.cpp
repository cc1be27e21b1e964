#include "eazy/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace eazy {

const char* label_token(Label l) { return l == Label::BonaFide ? "live" : "spoof"; }

Label parse_label_token(std::string token) {
  std::transform(token.begin(), token.end(), token.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (token == "live" || token == "bonafide") return Label::BonaFide;
  if (token == "spoof" || token == "attack" || token == "fake") return Label::Attack;
  throw FormatError("unknown label token '" + token + "'");
}

LabeledDataset::LabeledDataset(std::string name, std::size_t dim)
    : name_(std::move(name)), dim_(dim) {
  if (dim_ == 0) throw DataError("dataset dimension must be >= 1");
}

void LabeledDataset::add_row(std::span<const double> features, Label label) {
  if (features.size() != dim_)
    throw DataError("row dimension " + std::to_string(features.size()) +
                    " does not match dataset dimension " + std::to_string(dim_));
  for (double v : features)
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
  features_.insert(features_.end(), features.begin(), features.end());
  labels_.push_back(label);
}

void LabeledDataset::reserve(std::size_t rows) {
  features_.reserve(rows * dim_);
  labels_.reserve(rows);
}

std::size_t LabeledDataset::count(Label l) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), l));
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows,
                                      std::string name) const {
  LabeledDataset out(std::move(name), dim_);
  out.reserve(rows.size());
  for (std::size_t i : rows) {
    if (i >= size()) throw DataError("subset row index out of range");
    out.add_row(row(i), label(i));
  }
  return out;
}

LabeledDataset LabeledDataset::project(std::span<const std::size_t> feature_indices,
                                       std::string name) const {
  if (feature_indices.empty()) throw DataError("feature projection must keep >= 1 column");
  LabeledDataset out(std::move(name), feature_indices.size());
  out.reserve(size());
  std::vector<double> buf(feature_indices.size());
  for (std::size_t r = 0; r < size(); ++r) {
    auto src = row(r);
    for (std::size_t j = 0; j < feature_indices.size(); ++j) {
      if (feature_indices[j] >= dim_) throw DataError("projection column out of range");
      buf[j] = src[feature_indices[j]];
    }
    out.add_row(buf, label(r));
  }
  return out;
}

DataSplit stratified_split(const LabeledDataset& dataset, double fraction,
                           std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw DataError("split fraction must lie in (0,1)");

  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    by_class[static_cast<std::size_t>(dataset.label(i))].push_back(i);
  for (const auto& rows : by_class)
    if (rows.size() < 2)
      throw DataError("degenerate split: every class needs >= 2 rows, got " +
                      std::to_string(rows.size()));

  auto rng = make_rng(seed);
  std::vector<std::size_t> val_rows, train_rows;
  for (auto& rows : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
    auto n_val = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(rows.size())));
    val_rows.insert(val_rows.end(), rows.begin(), rows.begin() + n_val);
    train_rows.insert(train_rows.end(), rows.begin() + n_val, rows.end());
  }
  if (val_rows.empty() || train_rows.empty())
    throw DataError("degenerate split: fraction " + std::to_string(fraction) +
                    " leaves an empty side on " + std::to_string(dataset.size()) +
                    " rows");
  // Original row order within each side keeps the split independent of the
  // per-class shuffle interleaving.
  std::sort(val_rows.begin(), val_rows.end());
  std::sort(train_rows.begin(), train_rows.end());

  DataSplit split{dataset.subset(train_rows, dataset.name() + "-train"),
                  dataset.subset(val_rows, dataset.name() + "-val"), fraction};
  return split;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_feature(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw FormatError("line " + std::to_string(line_no) + ": non-numeric feature '" +
                      field + "'");
  if (!std::isfinite(value))
    throw FormatError("line " + std::to_string(line_no) + ": non-finite feature '" +
                      field + "'");
  return value;
}

}  // namespace

LabeledDataset load_dataset_csv(std::istream& in, std::string name) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty file: missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto header = split_fields(line);
  if (header.size() < 2 || header[0] != "label")
    throw FormatError("line 1: header must be 'label,f0,...'");
  const std::size_t dim = header.size() - 1;

  LabeledDataset dataset(std::move(name), dim);
  std::vector<double> features(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != dim + 1)
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(dim + 1) + " fields, got " +
                        std::to_string(fields.size()));
    Label label;
    try {
      label = parse_label_token(fields[0]);
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
    for (std::size_t j = 0; j < dim; ++j) features[j] = parse_feature(fields[j + 1], line_no);
    dataset.add_row(features, label);
  }
  if (dataset.empty()) throw FormatError("empty file: no data rows");
  return dataset;
}

namespace {

std::string format_feature(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

double csv_quantize(double v) {
  double out = 0.0;
  std::string s = format_feature(v);
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

void save_dataset_csv(const LabeledDataset& dataset, std::ostream& out) {
  out << "label";
  for (std::size_t j = 0; j < dataset.dim(); ++j) out << ",f" << j;
  out << '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out << label_token(dataset.label(i));
    for (double v : dataset.row(i)) out << ',' << format_feature(v);
    out << '\n';
  }
}

namespace {

std::string path_stem(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
  return base;
}

}  // namespace

LabeledDataset load_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file '" + path + "'");
  try {
    return load_dataset_csv(in, path_stem(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void save_dataset_file(const LabeledDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file '" + path + "'");
  save_dataset_csv(dataset, out);
  out.flush();
  if (!out) throw DataError("failed writing dataset file '" + path + "'");
}

Standardizer Standardizer::fit(const LabeledDataset& train) {
  if (train.empty()) throw DataError("standardizer needs a nonempty training set");
  const std::size_t d = train.dim();
  const double n = static_cast<double>(train.size());
  Standardizer s;
  s.means_.assign(d, 0.0);
  s.scales_.assign(d, 1.0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto r = train.row(i);
    for (std::size_t j = 0; j < d; ++j) s.means_[j] += r[j];
  }
  for (double& m : s.means_) m /= n;
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto r = train.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      double c = r[j] - s.means_[j];
      var[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    double sd = std::sqrt(var[j] / n);
    s.scales_[j] = sd < kSigmaFloor ? 1.0 : sd;
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t dim) {
  Standardizer s;
  s.means_.assign(dim, 0.0);
  s.scales_.assign(dim, 1.0);
  return s;
}

Standardizer Standardizer::from_parameters(std::vector<double> means,
                                           std::vector<double> scales) {
  if (means.size() != scales.size())
    throw DataError("standardizer parameter size mismatch");
  for (double s : scales)
    if (!(s > 0.0)) throw DataError("standardizer scales must be > 0");
  Standardizer s;
  s.means_ = std::move(means);
  s.scales_ = std::move(scales);
  return s;
}

void Standardizer::apply_row(std::span<const double> in, std::span<double> out) const {
  if (in.size() != dim() || out.size() != dim())
    throw DataError("standardizer dimension mismatch: fitted on " +
                    std::to_string(dim()) + ", got " + std::to_string(in.size()));
  for (std::size_t j = 0; j < in.size(); ++j) out[j] = (in[j] - means_[j]) / scales_[j];
}

std::vector<double> Standardizer::apply_row(std::span<const double> in) const {
  std::vector<double> out(in.size());
  apply_row(in, out);
  return out;
}

LabeledDataset Standardizer::apply(const LabeledDataset& data) const {
  if (data.dim() != dim())
    throw DataError("standardizer dimension mismatch: fitted on " +
                    std::to_string(dim()) + ", dataset has " +
                    std::to_string(data.dim()));
  LabeledDataset out(data.name(), data.dim());
  out.reserve(data.size());
  std::vector<double> buf(data.dim());
  for (std::size_t i = 0; i < data.size(); ++i) {
    apply_row(data.row(i), buf);
    out.add_row(buf, data.label(i));
  }
  return out;
}

}  // namespace eazy
