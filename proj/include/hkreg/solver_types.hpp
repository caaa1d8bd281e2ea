#pragma once

#include <cmath>
#include <vector>

#include "hkreg/errors.hpp"
#include "hkreg/kernel.hpp"

namespace hkreg {

/// Training sample z = {(x_i, y_i)}.
struct Dataset {
  Points xs;
  std::vector<double> ys;

  int n() const { return static_cast<int>(xs.size()); }

  void validate() const {
    if (xs.empty() || xs.size() != ys.size())
      throw ContractViolation("Dataset: needs n >= 1 with equal xs/ys lengths");
    const Eigen::Index dim = xs.front().size();
    for (const Point& x : xs) {
      if (x.size() != dim) throw ContractViolation("Dataset: mixed input dimensions");
      for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i])) throw ContractViolation("Dataset: non-finite input");
    }
    for (double y : ys)
      if (!std::isfinite(y)) throw ContractViolation("Dataset: non-finite response");
  }
};

/// Diagonal jitter escalation for factorization retries.
struct JitterPolicy {
  double initial = 1e-12;
  double factor = 10.0;
  int max_retries = 7;
};

}  // namespace hkreg
