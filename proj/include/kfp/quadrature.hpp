#pragma once

#include <vector>

namespace kfp {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule (Newton iteration on Pₙ).
GaussRule gauss_legendre(int n);

/// Composite rule: `panels` equal panels on [a, b], `order` points each.
GaussRule composite_gauss(double a, double b, int panels, int order);

}  // namespace kfp
