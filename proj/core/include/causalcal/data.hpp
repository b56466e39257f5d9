#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace causalcal {

enum class TreatmentKind { binary, continuous };

/// One experimental record. `d` is the assigned treatment / instrument column
/// used by the LATE losses; `a` is the treatment actually received.
struct Observation {
  std::vector<double> x;
  double a = 0.0;
  std::optional<double> d;
  double y = 0.0;
};

struct Schema {
  std::size_t dim = 0;
  TreatmentKind treatment = TreatmentKind::binary;
  bool has_instrument = false;
};

/// Column-ordered collection of observations, validated against its schema
/// at construction. Optionally carries one base prediction per row.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Schema schema, std::vector<Observation> rows,
          std::vector<double> base_predictions = {});

  const Schema& schema() const noexcept { return schema_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  const Observation& operator[](std::size_t i) const { return rows_[i]; }
  std::span<const Observation> rows() const noexcept { return rows_; }

  bool has_base_predictions() const noexcept { return !base_.empty(); }
  std::span<const double> base_predictions() const noexcept { return base_; }

  /// Rows at `indices`, in that order (base predictions follow along).
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  Schema schema_;
  std::vector<Observation> rows_;
  std::vector<double> base_;
};

/// Throws data-error naming the row when `obs` violates `schema`.
void validate_observation(const Schema& schema, const Observation& obs, std::size_t row);

}  // namespace causalcal
