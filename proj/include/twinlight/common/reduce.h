#ifndef TWINLIGHT_COMMON_REDUCE_H_
#define TWINLIGHT_COMMON_REDUCE_H_

#include <span>

namespace twinlight {

// Pairwise (tree) summation with a fixed split rule; the result depends only
// on the input order, never on how terms were produced.
inline double PairwiseSum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const size_t half = values.size() / 2;
  return PairwiseSum(values.first(half)) + PairwiseSum(values.subspan(half));
}

}  // namespace twinlight

#endif  // TWINLIGHT_COMMON_REDUCE_H_
