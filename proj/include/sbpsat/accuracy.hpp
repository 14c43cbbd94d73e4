#pragma once

#include <string>

#include "sbpsat/errors.hpp"

namespace sbpsat {

// Accuracy pair (p, r): interior order p, boundary-block order r = p/2.
struct AccuracyOrder {
  int interior_order = 2;
  int boundary_order = 1;

  static AccuracyOrder from_interior(int p) {
    if (p != 2 && p != 4 && p != 6)
      throw UnsupportedOrder("unsupported interior order " + std::to_string(p) +
                             " (supported: 2, 4, 6)");
    return AccuracyOrder{p, p / 2};
  }

  bool operator==(const AccuracyOrder&) const = default;
};

}  // namespace sbpsat
