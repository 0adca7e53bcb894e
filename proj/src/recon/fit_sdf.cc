#include "twinlight/recon/fit_sdf.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "twinlight/common/image.h"
#include "twinlight/common/parallel.h"
#include "twinlight/common/reduce.h"
#include "twinlight/common/rng.h"

namespace twinlight {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Floor on -dot(grad s, d) when differentiating the crossing depth; keeps
// grazing rays from producing unbounded node gradients.
constexpr double kMinSlope = 0.1;
constexpr int kSecantSteps = 8;
constexpr int kMaxHalvings = 60;
// Nearest hits whose ray directions vote on the initial sign; a single
// grazing ray is an unreliable witness.
constexpr size_t kSignVoters = 16;

// Parametric interval of the ray inside the box, or empty (lo > hi).
std::pair<double, double> ClipToBox(const Ray& ray, const Aabb& box) {
  double lo = ray.t_min, hi = ray.t_max;
  for (int a = 0; a < 3; ++a) {
    const double o = ray.origin[a], d = ray.direction[a];
    if (d == 0.0) {
      if (o < box.lo[a] || o > box.hi[a]) return {1.0, 0.0};
      continue;
    }
    double t0 = (box.lo[a] - o) / d, t1 = (box.hi[a] - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
  }
  return {lo, hi};
}

double MinSpacing(const SdfGrid& grid) { return grid.spacing().minCoeff(); }

// Per-term contribution: value and d(value)/d(node) over one stencil.
struct Term {
  double value = 0.0;
  bool active = false;
  std::array<size_t, 8> nodes{};
  std::array<double, 8> coeff{};
};

struct RayPlan {
  double t_lo = 0.0;
  double t_hi = -1.0;
  std::vector<double> freespace_t;
};

std::vector<RayPlan> PlanRays(const SdfGrid& grid, const std::vector<RangeSample>& samples,
                              const ReconConfig& config) {
  std::vector<RayPlan> plans(samples.size());
  for (size_t r = 0; r < samples.size(); ++r) {
    const RangeSample& s = samples[r];
    auto [lo, hi] = ClipToBox(s.ray, grid.bounds());
    RayPlan& p = plans[r];
    p.t_lo = lo;
    p.t_hi = hi;
    if (lo > hi || config.freespace_samples <= 0) continue;
    const double end = s.IsSky() ? hi : std::min(hi, s.depth - config.freespace_margin);
    if (!(end > lo)) continue;
    CounterRng rng(config.seed, kDomainFreeSpace, r);
    const int k = config.freespace_samples;
    for (int i = 0; i < k; ++i) {
      p.freespace_t.push_back(lo + (end - lo) * (i + rng.Uniform()) / k);
    }
  }
  return plans;
}

double CrossingInInterval(const SdfGrid& grid, const Ray& ray, double lo, double hi) {
  if (!(lo <= hi)) return kInf;
  const double h = MinSpacing(grid);
  auto at = [&](double t) { return grid.Sample(ray.origin + t * ray.direction); };
  double t = lo;
  double s = at(t);
  // Starting inside: walk out before looking for an entry.
  while (s <= 0.0 && t < hi) {
    t = std::min(t + 0.5 * h, hi);
    s = at(t);
  }
  if (s <= 0.0) return kInf;
  while (t < hi) {
    const double step = std::clamp(0.9 * s, 0.25 * h, 2.0 * h);
    const double tn = std::min(t + step, hi);
    const double sn = at(tn);
    if (sn <= 0.0) {
      // Illinois-style regula falsi on the bracket [t, tn].
      double a = t, fa = s, b = tn, fb = sn;
      int side = 0;
      for (int it = 0; it < kSecantSteps; ++it) {
        const double m = a + (b - a) * fa / (fa - fb);
        const double fm = at(m);
        if (fm > 0.0) {
          a = m;
          fa = fm;
          if (side == -1) fb *= 0.5;
          side = -1;
        } else {
          b = m;
          fb = fm;
          if (side == 1) fa *= 0.5;
          side = 1;
        }
      }
      return a + (b - a) * fa / (fa - fb);
    }
    t = tn;
    s = sn;
  }
  return kInf;
}

Term LidarTerm(const SdfGrid& grid, const RangeSample& sample, const RayPlan& plan) {
  Term term;
  term.active = true;
  const Ray& ray = sample.ray;
  const double t = CrossingInInterval(grid, ray, plan.t_lo, plan.t_hi);
  if (std::isfinite(t)) {
    const Vec3 x = ray.origin + t * ray.direction;
    const double r = t - sample.depth;
    const double slope = std::min(grid.SampleGradient(x).dot(ray.direction), -kMinSlope);
    const SdfGrid::Stencil st = grid.TrilinearStencil(x);
    term.value = r * r;
    term.nodes = st.nodes;
    for (int n = 0; n < 8; ++n) term.coeff[n] = 2.0 * r * (-st.weights[n] / slope);
  } else {
    // No surface along the ray: pull the observed point onto the level set.
    const Vec3 x = ray.origin + sample.depth * ray.direction;
    const SdfGrid::Stencil st = grid.TrilinearStencil(x);
    double s = 0.0;
    for (int n = 0; n < 8; ++n) s += st.weights[n] * grid.values()[st.nodes[n]];
    term.value = s * s;
    term.nodes = st.nodes;
    for (int n = 0; n < 8; ++n) term.coeff[n] = 2.0 * s * st.weights[n];
  }
  return term;
}

Term FreespaceTerm(const SdfGrid& grid, const Vec3& x, double margin) {
  Term term;
  const SdfGrid::Stencil st = grid.TrilinearStencil(x);
  double s = 0.0;
  for (int n = 0; n < 8; ++n) s += st.weights[n] * grid.values()[st.nodes[n]];
  const double gap = std::max(0.0, margin - s);
  term.active = true;
  term.value = gap * gap;
  term.nodes = st.nodes;
  for (int n = 0; n < 8; ++n) term.coeff[n] = -2.0 * gap * st.weights[n];
  return term;
}

// Sums active terms in index order: mean value and scaled gradient.
double Accumulate(const std::vector<Term>& terms, double weight, std::vector<double>* gradient) {
  std::vector<double> values;
  values.reserve(terms.size());
  for (const Term& t : terms) {
    if (t.active) values.push_back(t.value);
  }
  if (values.empty()) return 0.0;
  const double inv = 1.0 / static_cast<double>(values.size());
  if (gradient && weight != 0.0) {
    for (const Term& t : terms) {
      if (!t.active) continue;
      for (int n = 0; n < 8; ++n) (*gradient)[t.nodes[n]] += weight * inv * t.coeff[n];
    }
  }
  return PairwiseSum(values) * inv;
}

bool Interior(const SdfGrid& grid, int i, int j, int k) {
  const auto& r = grid.resolution();
  return i > 0 && j > 0 && k > 0 && i < r[0] - 1 && j < r[1] - 1 && k < r[2] - 1;
}

Vec3 CentralGradient(const SdfGrid& grid, int i, int j, int k) {
  const Vec3& h = grid.spacing();
  return Vec3((grid.at(i + 1, j, k) - grid.at(i - 1, j, k)) / (2 * h.x()),
              (grid.at(i, j + 1, k) - grid.at(i, j - 1, k)) / (2 * h.y()),
              (grid.at(i, j, k + 1) - grid.at(i, j, k - 1)) / (2 * h.z()));
}

// Nearest hit point per query through a uniform bucket grid.
class PointLocator {
 public:
  PointLocator(const std::vector<Vec3>& points, const Aabb& bounds) : points_(points) {
    lo_ = bounds.lo;
    const Vec3 ext = bounds.Extent();
    cell_ = std::max(ext.maxCoeff() / 32.0, 1e-12);
    for (int a = 0; a < 3; ++a) dims_[a] = std::max(1, static_cast<int>(std::ceil(ext[a] / cell_)));
    buckets_.resize(static_cast<size_t>(dims_[0]) * dims_[1] * dims_[2]);
    for (size_t i = 0; i < points.size(); ++i) {
      const auto c = CellOf(points[i]);
      buckets_[Flat(c[0], c[1], c[2])].push_back(static_cast<uint32_t>(i));
    }
  }

  // Indices of the k nearest points, nearest first; ties keep the lower index.
  std::vector<uint32_t> Nearest(const Vec3& x, size_t k) const {
    k = std::min(k, points_.size());
    const auto c = CellOf(x);
    std::vector<std::pair<double, uint32_t>> best;  // max-heap on (distance, index)
    const int max_ring = std::max({dims_[0], dims_[1], dims_[2]});
    for (int ring = 0; ring <= max_ring; ++ring) {
      for (int kz = c[2] - ring; kz <= c[2] + ring; ++kz) {
        if (kz < 0 || kz >= dims_[2]) continue;
        for (int j = c[1] - ring; j <= c[1] + ring; ++j) {
          if (j < 0 || j >= dims_[1]) continue;
          for (int i = c[0] - ring; i <= c[0] + ring; ++i) {
            if (i < 0 || i >= dims_[0]) continue;
            const int cheb = std::max({std::abs(i - c[0]), std::abs(j - c[1]), std::abs(kz - c[2])});
            if (cheb != ring) continue;
            for (uint32_t p : buckets_[Flat(i, j, kz)]) {
              const std::pair<double, uint32_t> cand((points_[p] - x).squaredNorm(), p);
              if (best.size() < k) {
                best.push_back(cand);
                std::push_heap(best.begin(), best.end());
              } else if (cand < best.front()) {
                std::pop_heap(best.begin(), best.end());
                best.back() = cand;
                std::push_heap(best.begin(), best.end());
              }
            }
          }
        }
      }
      // Anything in a farther ring is at least ring * cell away.
      if (best.size() == k && std::sqrt(best.front().first) <= ring * cell_) break;
    }
    std::sort_heap(best.begin(), best.end());
    std::vector<uint32_t> out;
    for (const auto& b : best) out.push_back(b.second);
    return out;
  }

 private:
  std::array<int, 3> CellOf(const Vec3& p) const {
    std::array<int, 3> c;
    for (int a = 0; a < 3; ++a) {
      c[a] = std::clamp(static_cast<int>(std::floor((p[a] - lo_[a]) / cell_)), 0, dims_[a] - 1);
    }
    return c;
  }
  size_t Flat(int i, int j, int k) const {
    return (static_cast<size_t>(k) * dims_[1] + j) * dims_[0] + i;
  }

  const std::vector<Vec3>& points_;
  Vec3 lo_;
  double cell_;
  std::array<int, 3> dims_;
  std::vector<std::vector<uint32_t>> buckets_;
};

void CheckSamples(const std::vector<RangeSample>& samples, const Aabb& bounds) {
  bool any_hit = false;
  const double tol = 1e-9 * std::max(1.0, bounds.Diagonal());
  for (size_t i = 0; i < samples.size(); ++i) {
    const RangeSample& s = samples[i];
    ValidateRay(s.ray);
    if (s.IsSky()) continue;
    Require(std::isfinite(s.depth) && s.depth > 0.0, "range depth must be > 0 or sky");
    any_hit = true;
    const Vec3 p = s.ray.origin + s.depth * s.ray.direction;
    if (!bounds.Contains(p, tol)) {
      std::ostringstream msg;
      msg << "hit point of sample " << i << " lies outside the SDF bounds";
      throw PreconditionError(msg.str());
    }
  }
  Require(any_hit, "SDF fitting needs at least one finite-depth sample");
}

}  // namespace

void ValidateReconConfig(const ReconConfig& c) {
  Require(c.lambda_lidar >= 0 && c.lambda_eikonal >= 0 && c.lambda_freespace >= 0,
          "recon loss weights must be >= 0");
  Require(c.iterations >= 0, "recon iterations must be >= 0");
  Require(c.step_size > 0 && std::isfinite(c.step_size), "recon step size must be > 0");
  Require(c.freespace_margin >= 0 && std::isfinite(c.freespace_margin),
          "free-space margin must be >= 0");
  Require(c.freespace_samples >= 0, "free-space sample count must be >= 0");
}

double FirstZeroCrossing(const SdfGrid& grid, const Ray& ray) {
  auto [lo, hi] = ClipToBox(ray, grid.bounds());
  return CrossingInInterval(grid, ray, lo, hi);
}

double EikonalPenalty(const SdfGrid& grid, std::vector<double>* gradient) {
  const auto& r = grid.resolution();
  const size_t count = static_cast<size_t>(std::max(0, r[0] - 2)) * std::max(0, r[1] - 2) *
                       std::max(0, r[2] - 2);
  if (gradient) gradient->assign(grid.NodeCount(), 0.0);
  if (count == 0) return 0.0;
  const double inv = 1.0 / static_cast<double>(count);
  // Per-node residual and d(term)/d(gradient), computed slice by slice.
  std::vector<double> terms(grid.NodeCount(), 0.0);
  std::vector<Vec3> coeff(gradient ? grid.NodeCount() : 0, Vec3::Zero());
  ParallelFor(1, r[2] - 1, [&](int k) {
    for (int j = 1; j < r[1] - 1; ++j) {
      for (int i = 1; i < r[0] - 1; ++i) {
        const size_t n = grid.Index(i, j, k);
        const Vec3 g = CentralGradient(grid, i, j, k);
        const double len = g.norm();
        terms[n] = (len - 1.0) * (len - 1.0);
        if (gradient && len > 0.0) coeff[n] = (2.0 * (len - 1.0) / len * inv) * g;
      }
    }
  });
  std::vector<double> packed;
  packed.reserve(count);
  for (int k = 1; k < r[2] - 1; ++k)
    for (int j = 1; j < r[1] - 1; ++j)
      for (int i = 1; i < r[0] - 1; ++i) packed.push_back(terms[grid.Index(i, j, k)]);
  if (gradient) {
    const Vec3& h = grid.spacing();
    // Gather: node m appears as the +/- neighbour of interior nodes m -/+ e_a.
    ParallelFor(0, r[2], [&](int k) {
      for (int j = 0; j < r[1]; ++j) {
        for (int i = 0; i < r[0]; ++i) {
          double acc = 0.0;
          const int idx[3] = {i, j, k};
          for (int a = 0; a < 3; ++a) {
            int lo[3] = {i, j, k}, hi[3] = {i, j, k};
            lo[a] = idx[a] - 1;
            hi[a] = idx[a] + 1;
            if (lo[a] >= 0 && Interior(grid, lo[0], lo[1], lo[2])) {
              acc += coeff[grid.Index(lo[0], lo[1], lo[2])][a] / (2 * h[a]);
            }
            if (hi[a] < r[a] && Interior(grid, hi[0], hi[1], hi[2])) {
              acc -= coeff[grid.Index(hi[0], hi[1], hi[2])][a] / (2 * h[a]);
            }
          }
          (*gradient)[grid.Index(i, j, k)] = acc;
        }
      }
    });
  }
  return PairwiseSum(packed) * inv;
}

EikonalStats EikonalResidual(const SdfGrid& grid) {
  ValidateSdfGrid(grid);
  const auto& r = grid.resolution();
  std::vector<double> res;
  for (int k = 1; k < r[2] - 1; ++k)
    for (int j = 1; j < r[1] - 1; ++j)
      for (int i = 1; i < r[0] - 1; ++i) res.push_back(std::abs(CentralGradient(grid, i, j, k).norm() - 1.0));
  if (res.empty()) return {};
  EikonalStats stats;
  stats.mean = PairwiseSum(res) / static_cast<double>(res.size());
  const size_t rank = static_cast<size_t>(std::ceil(0.95 * res.size())) - 1;
  std::nth_element(res.begin(), res.begin() + rank, res.end());
  stats.p95 = res[rank];
  return stats;
}

LossTerms EvaluateReconLoss(const SdfGrid& grid, const std::vector<RangeSample>& samples,
                            const ReconConfig& config, std::vector<double>* gradient) {
  const std::vector<RayPlan> plans = PlanRays(grid, samples, config);
  const int n = static_cast<int>(samples.size());
  const int k = std::max(0, config.freespace_samples);
  std::vector<Term> lidar(samples.size());
  std::vector<Term> free(samples.size() * k);
  ParallelFor(0, n, [&](int r) {
    const RangeSample& s = samples[r];
    if (!s.IsSky()) lidar[r] = LidarTerm(grid, s, plans[r]);
    const auto& ts = plans[r].freespace_t;
    for (size_t i = 0; i < ts.size(); ++i) {
      free[static_cast<size_t>(r) * k + i] =
          FreespaceTerm(grid, s.ray.origin + ts[i] * s.ray.direction, config.freespace_margin);
    }
  });
  LossTerms loss;
  if (gradient) {
    EikonalPenalty(grid, gradient);
    for (double& g : *gradient) g *= config.lambda_eikonal;
  }
  loss.eikonal = EikonalPenalty(grid);
  loss.lidar = Accumulate(lidar, config.lambda_lidar, gradient);
  loss.freespace = Accumulate(free, config.lambda_freespace, gradient);
  loss.total = config.lambda_lidar * loss.lidar + config.lambda_eikonal * loss.eikonal +
               config.lambda_freespace * loss.freespace;
  return loss;
}

SdfGrid InitializeSdf(const std::vector<RangeSample>& samples, const Aabb& bounds,
                      std::array<int, 3> resolution) {
  CheckSamples(samples, bounds);
  std::vector<Vec3> hits;
  std::vector<Vec3> dirs;
  for (const RangeSample& s : samples) {
    if (s.IsSky()) continue;
    hits.push_back(s.ray.origin + s.depth * s.ray.direction);
    dirs.push_back(s.ray.direction);
  }
  SdfGrid grid(bounds, resolution);
  const PointLocator locator(hits, bounds);
  ParallelFor(0, resolution[2], [&](int k) {
    for (int j = 0; j < resolution[1]; ++j) {
      for (int i = 0; i < resolution[0]; ++i) {
        const Vec3 x = grid.NodePosition(i, j, k);
        const auto near = locator.Nearest(x, kSignVoters);
        double vote = 0.0;
        for (uint32_t p : near) {
          const Vec3 off = x - hits[p];
          const double len = off.norm();
          if (len > 0.0) vote += off.dot(dirs[p]) / len;
        }
        const double d = (x - hits[near.front()]).norm();
        grid.at(i, j, k) = vote > 0.0 ? -d : d;
      }
    }
  });
  return grid;
}

FitResult FitSdf(const std::vector<RangeSample>& samples, const Aabb& bounds,
                 std::array<int, 3> resolution, const ReconConfig& config) {
  ValidateReconConfig(config);
  FitResult result;
  result.grid = InitializeSdf(samples, bounds, resolution);

  std::vector<double> grad;
  LossTerms loss = EvaluateReconLoss(result.grid, samples, config, &grad);
  auto check = [](const LossTerms& l) {
    if (!std::isfinite(l.total)) {
      throw std::runtime_error("SDF fit diverged: loss is not finite (step size too large)");
    }
  };
  check(loss);
  result.trace.push_back(loss);

  double step = config.step_size;
  SdfGrid candidate = result.grid;
  std::vector<double> candidate_grad;
  for (int it = 0; it < config.iterations; ++it) {
    bool accepted = false;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
      auto& v = candidate.values();
      const auto& cur = result.grid.values();
      for (size_t n = 0; n < v.size(); ++n) v[n] = cur[n] - step * grad[n];
      const LossTerms trial = EvaluateReconLoss(candidate, samples, config, &candidate_grad);
      check(trial);
      if (trial.total < loss.total) {
        std::swap(result.grid, candidate);
        std::swap(grad, candidate_grad);
        loss = trial;
        step *= 1.25;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no step size decreases the loss any further
    result.trace.push_back(loss);
  }
  return result;
}

}  // namespace twinlight
