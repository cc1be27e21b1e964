#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <variant>

#include "eazy/baselines.hpp"
#include "eazy/ensemble.hpp"

namespace eazy {

// A trained model of any method, as stored in a model file. Prediction
// dispatches to the wrapped ensemble and is round-trip exact: a saved and
// reloaded model predicts bitwise-identically to the original.
struct AnyModel {
  std::variant<EazyEnsemble, BaselineEnsemble> model;

  Label predict(std::span<const double> x) const;
  std::vector<Label> predict_batch(const LabeledDataset& data) const;
  std::string method_token() const;  // "eazy", "rsm", "bagging", "adaboost", "rf"
  std::size_t dim() const;
};

// Self-describing versioned model container (JSON, format tag "eazy-model",
// version 1). Doubles are stored in shortest round-trip form, so reload is
// value-exact. load throws VersionError on an unsupported version and
// FormatError on anything structurally wrong.
void save_model(const AnyModel& model, std::ostream& out);
void save_model(const EazyEnsemble& ensemble, std::ostream& out);
void save_model(const BaselineEnsemble& ensemble, std::ostream& out);
AnyModel load_model(std::istream& in);

void save_model_file(const AnyModel& model, const std::string& path);
AnyModel load_model_file(const std::string& path);

}  // namespace eazy
