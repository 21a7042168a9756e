#pragma once

namespace bayesic::kernels::detail {

// exp(x) for x below this bound is subnormal; both kernel paths flush to 0.
inline constexpr double kExpFlushBelow = -708.3964185322641;
// exp(x) overflows above this bound.
inline constexpr double kExpOverflowAbove = 709.782712893384;

}  // namespace bayesic::kernels::detail
