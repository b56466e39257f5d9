#include "causalcal/predictor.hpp"

#include <sstream>

#include "causalcal/data.hpp"
#include "causalcal/error.hpp"

namespace causalcal {

Predictor::Predictor(std::string description, Fn fn)
    : fn_(std::make_shared<const Fn>(std::move(fn))), description_(std::move(description)) {
  if (!*fn_) throw Error(ErrorCategory::invalid_argument, "predictor needs a callable");
}

Predictor Predictor::constant(double value) {
  std::ostringstream os;
  os.precision(17);
  os << "constant(" << value << ")";
  return Predictor(os.str(), [value](std::span<const double>) { return value; });
}

std::vector<double> predict_rows(const Predictor& p, const Dataset& data) {
  if (!p.valid()) throw Error(ErrorCategory::invalid_state, "predictor is empty");
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& row : data.rows()) out.push_back(p(row.x));
  return out;
}

std::vector<double> with_treatment(double a, std::span<const double> x) {
  std::vector<double> v;
  v.reserve(x.size() + 1);
  v.push_back(a);
  v.insert(v.end(), x.begin(), x.end());
  return v;
}

}  // namespace causalcal
