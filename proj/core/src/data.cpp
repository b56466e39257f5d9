#include "causalcal/data.hpp"

#include <cmath>
#include <string>

#include "causalcal/error.hpp"

namespace causalcal {

void validate_observation(const Schema& schema, const Observation& obs, std::size_t row) {
  auto fail = [row](const std::string& what) {
    throw Error(ErrorCategory::data_error, "row " + std::to_string(row) + ": " + what);
  };
  if (obs.x.size() != schema.dim) {
    fail("expected " + std::to_string(schema.dim) + " covariates, got " +
         std::to_string(obs.x.size()));
  }
  for (double v : obs.x) {
    if (!std::isfinite(v)) fail("non-finite covariate");
  }
  if (!std::isfinite(obs.y)) fail("non-finite outcome");
  if (schema.treatment == TreatmentKind::binary) {
    if (obs.a != 0.0 && obs.a != 1.0) fail("binary treatment must be 0 or 1");
  } else if (!(obs.a >= 0.0 && obs.a <= 1.0)) {
    fail("continuous treatment must lie in [0, 1]");
  }
  if (schema.has_instrument) {
    if (!obs.d) fail("missing instrument value");
    if (*obs.d != 0.0 && *obs.d != 1.0) fail("instrument must be 0 or 1");
  } else if (obs.d) {
    fail("unexpected instrument value");
  }
}

Dataset::Dataset(Schema schema, std::vector<Observation> rows, std::vector<double> base_predictions)
    : schema_(schema), rows_(std::move(rows)), base_(std::move(base_predictions)) {
  if (!base_.empty() && base_.size() != rows_.size()) {
    throw Error(ErrorCategory::invalid_argument, "base prediction count does not match row count");
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) validate_observation(schema_, rows_[i], i);
  for (std::size_t i = 0; i < base_.size(); ++i) {
    if (!std::isfinite(base_[i])) {
      throw Error(ErrorCategory::data_error, "row " + std::to_string(i) + ": non-finite base prediction");
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.schema_ = schema_;
  out.rows_.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= rows_.size()) throw Error(ErrorCategory::invalid_argument, "subset index out of range");
    out.rows_.push_back(rows_[i]);
    if (!base_.empty()) out.base_.push_back(base_[i]);
  }
  return out;
}

}  // namespace causalcal
