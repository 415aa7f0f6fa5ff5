#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace aoi {

/// Nondecreasing age-penalty function delta -> cost(delta), delta >= 1.
struct CostFunction {
  std::string name;
  std::function<double(std::int64_t)> at;
};

/// cost(delta) = delta.
CostFunction linear_cost();

/// cost(delta) = eta^delta, clipped at 1e300 to stay finite on large
/// truncated state spaces (eta > 0; typically eta > 1).
CostFunction exp_cost(double eta);

/// Parses "linear" or "exp:<eta>"; throws std::invalid_argument otherwise.
CostFunction parse_cost(const std::string& text);

}  // namespace aoi
