#include <algorithm>
#include <cmath>
#include <vector>

#include "twinlight/common/parallel.h"
#include "twinlight/common/reduce.h"
#include "twinlight/relight/relight.h"

namespace twinlight {

void ValidateLossWeights(const LossWeights& weights) {
  Require(std::isfinite(weights.lambda_lpips) && weights.lambda_lpips >= 0.0, "lambda_lpips must be >= 0");
  Require(std::isfinite(weights.lambda_edge) && weights.lambda_edge >= 0.0, "lambda_edge must be >= 0");
}

RelightLosses ComputeRelightLosses(const Image& pred, const Image& target, const LossWeights& weights) {
  Require(pred.SameSize(target) && pred.channels == target.channels, "loss inputs differ in size");
  Require(pred.channels == 3 && pred.PixelCount() > 0, "loss inputs must be non-empty RGB images");
  ValidateLossWeights(weights);
  const int w = pred.width, h = pred.height;
  auto diff = [&](int x, int y, int k) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return static_cast<double>(pred.at(x, y, k)) - target.at(x, y, k);
  };
  std::vector<double> color(static_cast<size_t>(w) * h), edge(color.size());
  ParallelFor(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double c2 = 0.0, e2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double d = diff(x, y, k);
        c2 += d * d;
        const double gx = (diff(x + 1, y - 1, k) + 2 * diff(x + 1, y, k) + diff(x + 1, y + 1, k)) -
                          (diff(x - 1, y - 1, k) + 2 * diff(x - 1, y, k) + diff(x - 1, y + 1, k));
        const double gy = (diff(x - 1, y + 1, k) + 2 * diff(x, y + 1, k) + diff(x + 1, y + 1, k)) -
                          (diff(x - 1, y - 1, k) + 2 * diff(x, y - 1, k) + diff(x + 1, y - 1, k));
        e2 += gx * gx + gy * gy;
      }
      const size_t i = static_cast<size_t>(y) * w + x;
      color[i] = std::sqrt(c2);
      edge[i] = std::sqrt(e2);
    }
  });
  RelightLosses out;
  out.color = PairwiseSum(color) / static_cast<double>(color.size());
  out.edge = PairwiseSum(edge) / static_cast<double>(edge.size());
  out.total = out.color + weights.lambda_edge * out.edge;
  return out;
}

}  // namespace twinlight
