#pragma once

#include <cstddef>
#include <vector>

#include "bayesic/models.hpp"

namespace bayesic {

/// Almost-sure large-sample limit shared by DIC_n, BPIC_n and WBIC_n, which
/// is -2 E[log p(X | theta0)] in every case.
struct LimitValue {
  ModelKind model;
  double value;
  // Population moments the limit was computed from.
  std::vector<double> inputs;
};

// 2 log(1 + EX) - 2 EX log(EX / (1 + EX)); EX > 0.
LimitValue limit_geometric(double ex);

// p log(2 pi) + E||X||^2 - ||EX||^2; requires e_norm_sq >= norm_e_sq >= 0.
LimitValue limit_normal(std::size_t p, double e_norm_sq, double norm_e_sq);

// 2 log(2 gamma0) + 2.
LimitValue limit_laplace(double gamma0);

/// Derives the population moments from `dgp`. For Laplace data gamma0 is the
/// DGP scale (mean absolute deviation about the median).
LimitValue limit_for(const ModelSpec& model, const DataGeneratingProcess& dgp);

}  // namespace bayesic
