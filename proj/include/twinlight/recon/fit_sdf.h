#ifndef TWINLIGHT_RECON_FIT_SDF_H_
#define TWINLIGHT_RECON_FIT_SDF_H_

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "twinlight/geometry/bvh.h"
#include "twinlight/geometry/sdf_grid.h"

namespace twinlight {

// One range observation. `depth` is the hit distance along the unit ray
// direction, or +infinity for a sky return.
struct RangeSample {
  Ray ray;
  double depth = std::numeric_limits<double>::infinity();

  bool IsSky() const { return depth == std::numeric_limits<double>::infinity(); }
};

struct ReconConfig {
  double lambda_lidar = 1.0;
  double lambda_eikonal = 0.1;
  double lambda_freespace = 0.1;
  int iterations = 300;
  // Initial gradient-descent step; halved on every rejected step and grown
  // by 1.25 after an accepted one.
  double step_size = 50.0;
  double freespace_margin = 0.1;
  int freespace_samples = 8;
  uint64_t seed = 0;
};

// Weights >= 0, iterations >= 0, step > 0, margin >= 0, samples >= 0.
void ValidateReconConfig(const ReconConfig& config);

struct LossTerms {
  double lidar = 0.0;
  double eikonal = 0.0;
  double freespace = 0.0;
  double total = 0.0;
};

struct FitResult {
  SdfGrid grid;
  // Row 0 is the initialisation; row i the state after iteration i. The
  // fit stops early once no step size strictly lowers the loss.
  std::vector<LossTerms> trace;
};

// Coarse start: unsigned distance to the nearest observed hit point, negative
// where the node lies beyond that hit along its ray.
SdfGrid InitializeSdf(const std::vector<RangeSample>& samples, const Aabb& bounds,
                      std::array<int, 3> resolution);

// Gradient descent on the node values. Throws PreconditionError without a
// finite-depth sample or when a hit lies outside `bounds`, and
// std::runtime_error if the loss becomes non-finite.
FitResult FitSdf(const std::vector<RangeSample>& samples, const Aabb& bounds,
                 std::array<int, 3> resolution, const ReconConfig& config = {});

// First crossing from s > 0 to s <= 0 along the ray inside the grid bounds.
// Returns +infinity when there is none.
double FirstZeroCrossing(const SdfGrid& grid, const Ray& ray);

// Mean over interior nodes of (|grad s| - 1)^2 with central differences.
// When `gradient` is given it receives d(penalty)/d(node value).
double EikonalPenalty(const SdfGrid& grid, std::vector<double>* gradient = nullptr);

struct EikonalStats {
  double mean = 0.0;
  double p95 = 0.0;
};

// | |grad s| - 1 | over interior nodes; boundary nodes are excluded.
EikonalStats EikonalResidual(const SdfGrid& grid);

// Evaluates the weighted loss of `grid` against `samples`; optional gradient
// with respect to the node values. Free-space points are drawn from `seed`.
LossTerms EvaluateReconLoss(const SdfGrid& grid, const std::vector<RangeSample>& samples,
                            const ReconConfig& config, std::vector<double>* gradient = nullptr);

}  // namespace twinlight

#endif  // TWINLIGHT_RECON_FIT_SDF_H_
