#include "aoi/cost.hpp"

#include <cmath>
#include <stdexcept>

namespace aoi {

CostFunction linear_cost() {
  return {"linear",
          [](std::int64_t delta) { return static_cast<double>(delta); }};
}

CostFunction exp_cost(double eta) {
  if (!(eta > 0.0)) {
    throw std::invalid_argument("exponential cost base eta must be > 0");
  }
  return {"exp:" + std::to_string(eta), [eta](std::int64_t delta) {
            const double v = std::pow(eta, static_cast<double>(delta));
            return v < 1e300 ? v : 1e300;
          }};
}

CostFunction parse_cost(const std::string& text) {
  if (text == "linear") return linear_cost();
  if (text.rfind("exp:", 0) == 0) {
    return exp_cost(std::stod(text.substr(4)));
  }
  throw std::invalid_argument("unknown cost function '" + text +
                              "' (expected 'linear' or 'exp:<eta>')");
}

}  // namespace aoi
