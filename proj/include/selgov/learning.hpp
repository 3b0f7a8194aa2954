#pragma once

// Projections onto the sovereignty sets and the dual projected-gradient
// updates for selection (theta) and reducer (phi) parameters.

#include <span>
#include <vector>

#include "selgov/domain.hpp"
#include "selgov/scoring.hpp"

namespace selgov {

// Euclidean projection onto {q : sum q = 1, floor <= q_i <= cap}.
// Water-filling on the shift nu in q_i = clip(p_i - nu, floor, cap): the
// breakpoints are sorted, the crossing segment solved exactly, and the
// residual spread over the unclipped coordinates.
// Throws InfeasibleConstraintSet unless floor*len <= 1 <= cap*len.
std::vector<double> project_capped_simplex(std::span<const double> p, double floor, double cap);

// True when every surfaced set of size >= 2 has a policy inside [p_min, gamma].
bool policy_feasible(std::span<const ScoreVector> surfaced_sets, const SelectionParams& theta,
                     const ConstraintSpec& spec);

inline constexpr int kMaxBisectionIterations = 40;

struct ThetaProjection {
  SelectionParams theta;
  std::vector<ClipEvent> clip_events;
  double step_scale = 1.0;
};

// Two stages: clamp every coordinate into the theta box, then, if the induced
// policy on any sampled surfaced set leaves [p_min, gamma], bisect the step
// scale between `before` and the boxed point. If `before` is itself infeasible
// on the sample it is first shrunk toward the uniform policy (theta = 0).
ThetaProjection project_theta(const SelectionParams& before, const SelectionParams& raw,
                              std::span<const ScoreVector> surfaced_sample,
                              const ValidatedConstraintSpec& spec);

struct PhiProjection {
  ReducerParams phi;
  std::vector<ClipEvent> clip_events;
};

// Coordinate-wise box: sigma <= sigma_max, k >= k_min, d >= d_min, eps in [0, 1].
PhiProjection project_phi(const ReducerParams& raw, const ValidatedConstraintSpec& spec);

template <typename Params>
struct UpdateOutcome {
  Params before;
  Params raw;
  Params after;
  std::vector<ClipEvent> clip_events;
};

UpdateOutcome<SelectionParams> update_selection(const SelectionParams& theta,
                                                std::span<const double> grad, int reward,
                                                double lr_alpha,
                                                std::span<const ScoreVector> surfaced_sample,
                                                const ValidatedConstraintSpec& spec, Mode mode);

// Differentiable surrogate of selection quality over the surfaced scores:
//   L(phi) = sum_i softmax(c)_i * c_i - eps * tau,  c = variance_clamp(s, sigma)
// i.e. the expected clamped score under a soft selection, penalised by how
// tight the threshold is.
double selection_surrogate(const ReducerParams& phi, std::span<const double> surfaced_scores);

struct SurrogateGradient {
  double score_threshold = 0.0;
  double variance_clamp = 0.0;
  double exploration_coeff = 0.0;
};

SurrogateGradient selection_surrogate_grad(const ReducerParams& phi,
                                           std::span<const double> surfaced_scores);

// Positive floor that keeps sigma a valid clamp width in every mode.
inline constexpr double kSigmaFloor = 1e-6;

UpdateOutcome<ReducerParams> update_reducer(const ReducerParams& phi, int reward, double lr_beta,
                                            std::span<const double> surfaced_scores,
                                            const ValidatedConstraintSpec& spec, Mode mode);

}  // namespace selgov
