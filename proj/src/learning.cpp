#include "selgov/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "selgov/error.hpp"
#include "selgov/reducer.hpp"

namespace selgov {

std::vector<double> project_capped_simplex(std::span<const double> p, double floor, double cap) {
  const std::size_t n = p.size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "projection of an empty vector");
  const double len = static_cast<double>(n);
  if (floor > cap || floor * len > 1.0 + 1e-12 || cap * len < 1.0 - 1e-12) {
    throw Error(ErrorCode::kInfeasibleConstraintSet,
                "capped simplex is empty for length " + std::to_string(n));
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  const bool inside = std::all_of(p.begin(), p.end(), [&](double x) { return x >= floor && x <= cap; });
  if (inside && std::abs(total - 1.0) <= 1e-12) return {p.begin(), p.end()};

  auto clipped = [&](double nu, std::size_t i) { return std::clamp(p[i] - nu, floor, cap); };
  auto mass = [&](double nu) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += clipped(nu, i);
    return s;
  };

  // mass(nu) is non-increasing and piecewise linear with kinks at p_i - cap
  // and p_i - floor; locate the segment where it crosses 1.
  std::vector<double> kinks;
  kinks.reserve(2 * n);
  for (double x : p) {
    kinks.push_back(x - cap);
    kinks.push_back(x - floor);
  }
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());

  double nu = kinks.front();
  double prev_nu = kinks.front();
  double prev_mass = mass(prev_nu);
  if (prev_mass > 1.0) {
    for (std::size_t j = 1; j < kinks.size(); ++j) {
      const double m = mass(kinks[j]);
      if (m <= 1.0) {
        nu = (prev_mass == m) ? kinks[j]
                              : prev_nu + (prev_mass - 1.0) / (prev_mass - m) * (kinks[j] - prev_nu);
        break;
      }
      prev_nu = kinks[j];
      prev_mass = m;
      nu = kinks[j];
    }
  }

  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = clipped(nu, i);

  // spread the rounding residual over coordinates strictly inside the box
  for (int pass = 0; pass < 4; ++pass) {
    const double residual = 1.0 - std::accumulate(q.begin(), q.end(), 0.0);
    if (std::abs(residual) < 1e-15) break;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i) {
      if (q[i] > floor && q[i] < cap) free.push_back(i);
    }
    if (free.empty()) break;
    for (std::size_t i : free) q[i] = std::clamp(q[i] + residual / static_cast<double>(free.size()), floor, cap);
  }
  return q;
}

namespace {

bool probabilities_feasible(std::span<const double> p, const ConstraintSpec& spec) {
  return std::all_of(p.begin(), p.end(), [&](double x) { return x >= spec.p_min && x <= spec.gamma; });
}

std::string coordinate_name(std::size_t i, std::size_t num_weights) {
  if (i < num_weights) {
    const std::string feature = i < kFeatureNames.size() ? std::string(kFeatureNames[i]) : std::to_string(i);
    return "theta.feature_weights[" + feature + "]";
  }
  return "theta.agent_bias[" + std::to_string(i - num_weights) + "]";
}

SelectionParams with_coordinates(const SelectionParams& like, std::span<const double> coords) {
  SelectionParams out = like;
  out.set_coordinates(coords);
  return out;
}

std::vector<double> lerp(std::span<const double> a, std::span<const double> b, double t) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

// Largest t in [0,1] (to bisection precision) with feasible(from + t*(to-from)),
// given that t = 0 is feasible.
double bisect_step(std::span<const double> from, std::span<const double> to,
                   const SelectionParams& like, std::span<const ScoreVector> sample,
                   const ConstraintSpec& spec) {
  if (policy_feasible(sample, with_coordinates(like, to), spec)) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < kMaxBisectionIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (policy_feasible(sample, with_coordinates(like, lerp(from, to, mid)), spec)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

constexpr int kRestorationSweeps = 50;
// Restoration aims this far inside each violated bound (relative).
constexpr double kRestorationMargin = 1e-6;

// Moves `coords` back into the policy constraint set by cyclic projection
// onto each violated log-probability bound, linearised at the current point.
// Returns false when the sweeps run out before every bound holds.
bool restore_feasibility(std::vector<double>& coords, const SelectionParams& like,
                         std::span<const ScoreVector> sample, const ConstraintSpec& spec) {
  const double lo = std::log(spec.p_min * (1.0 + kRestorationMargin));
  const double hi = std::log(spec.gamma * (1.0 - kRestorationMargin));
  for (int sweep = 0; sweep < kRestorationSweeps; ++sweep) {
    bool violated = false;
    for (const auto& set : sample) {
      if (set.size() < 2) continue;
      for (std::size_t i = 0; i < set.size(); ++i) {
        const SelectionParams at = with_coordinates(like, coords);
        const auto scored = rescore(set, at);
        const double lp = std::log(policy(scored, at)[i]);
        const double target = lp < std::log(spec.p_min) ? lo : (lp > std::log(spec.gamma) ? hi : lp);
        if (target == lp) continue;
        violated = true;
        const auto g = log_policy_grad(scored, at, i);
        const double gg = std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
        if (gg <= 0.0) continue;
        for (std::size_t k = 0; k < coords.size(); ++k) {
          const Bounds b = spec.theta_bounds(k);
          coords[k] = std::clamp(coords[k] + (target - lp) / gg * g[k], b.lo, b.hi);
        }
      }
    }
    if (!violated) return true;
  }
  return policy_feasible(sample, with_coordinates(like, coords), spec);
}

}  // namespace

bool policy_feasible(std::span<const ScoreVector> surfaced_sets, const SelectionParams& theta,
                     const ConstraintSpec& spec) {
  for (const auto& set : surfaced_sets) {
    if (set.size() < 2) continue;
    const auto p = policy(rescore(set, theta), theta);
    if (!probabilities_feasible(p, spec)) return false;
  }
  return true;
}

ThetaProjection project_theta(const SelectionParams& before, const SelectionParams& raw,
                              std::span<const ScoreVector> surfaced_sample,
                              const ValidatedConstraintSpec& spec) {
  const ConstraintSpec& c = spec.get();
  ThetaProjection out;
  const std::size_t nw = raw.feature_weights.size();

  auto boxed = raw.coordinates();
  for (std::size_t i = 0; i < boxed.size(); ++i) {
    if (!std::isfinite(boxed[i])) throw Error(ErrorCode::kInvalidArgument, "theta must be finite");
    const Bounds b = c.theta_bounds(i);
    const double clamped = std::clamp(boxed[i], b.lo, b.hi);
    if (clamped != boxed[i]) {
      out.clip_events.push_back({coordinate_name(i, nw), boxed[i], clamped, "theta_box"});
      boxed[i] = clamped;
    }
  }
  out.theta = with_coordinates(raw, boxed);
  if (policy_feasible(surfaced_sample, out.theta, c)) return out;

  for (const auto& set : surfaced_sample) {
    if (set.size() < 2) continue;
    const auto p = policy(rescore(set, out.theta), out.theta);
    if (probabilities_feasible(p, c)) continue;
    const auto q = project_capped_simplex(p, c.p_min, c.gamma);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > c.gamma || p[i] < c.p_min) {
        out.clip_events.push_back({"policy[" + std::to_string(set[i].agent) + "]", p[i], q[i],
                                   p[i] > c.gamma ? "gamma" : "p_min"});
      }
    }
  }

  auto anchor = before.coordinates();
  for (std::size_t i = 0; i < anchor.size(); ++i) {
    const Bounds b = c.theta_bounds(i);
    anchor[i] = std::clamp(anchor[i], b.lo, b.hi);
  }
  if (!policy_feasible(surfaced_sample, with_coordinates(raw, anchor), c)) {
    const std::vector<double> origin(anchor.size(), 0.0);
    if (!policy_feasible(surfaced_sample, with_coordinates(raw, origin), c)) {
      throw Error(ErrorCode::kInfeasibleConstraintSet,
                  "uniform policy violates the constraint set on a sampled surfaced set");
    }
    const double shrink = bisect_step(origin, anchor, raw, surfaced_sample, c);
    out.clip_events.push_back({"theta.anchor_scale", 1.0, shrink, "policy_feasibility"});
    anchor = lerp(origin, anchor, shrink);
  }

  auto target = boxed;
  if (!restore_feasibility(target, raw, surfaced_sample, c)) target = boxed;
  out.step_scale = bisect_step(anchor, target, raw, surfaced_sample, c);
  out.theta = with_coordinates(raw, lerp(anchor, target, out.step_scale));
  out.clip_events.push_back({"theta.step_scale", 1.0, out.step_scale, "policy_feasibility"});
  return out;
}

PhiProjection project_phi(const ReducerParams& raw, const ValidatedConstraintSpec& spec) {
  const ConstraintSpec& c = spec.get();
  PhiProjection out{raw, {}};
  if (raw.variance_clamp > c.sigma_max) {
    out.phi.variance_clamp = c.sigma_max;
    out.clip_events.push_back({"phi.variance_clamp", raw.variance_clamp, c.sigma_max, "sigma_max"});
  }
  if (raw.exploration_quota < c.k_min) {
    out.phi.exploration_quota = c.k_min;
    out.clip_events.push_back({"phi.exploration_quota", static_cast<double>(raw.exploration_quota),
                               static_cast<double>(c.k_min), "k_min"});
  }
  if (raw.diversity_buckets < c.d_min) {
    out.phi.diversity_buckets = c.d_min;
    out.clip_events.push_back({"phi.diversity_buckets", static_cast<double>(raw.diversity_buckets),
                               static_cast<double>(c.d_min), "d_min"});
  }
  const double eps = std::clamp(raw.exploration_coeff, 0.0, 1.0);
  if (eps != raw.exploration_coeff) {
    out.phi.exploration_coeff = eps;
    out.clip_events.push_back({"phi.exploration_coeff", raw.exploration_coeff, eps, "unit_interval"});
  }
  return out;
}

UpdateOutcome<SelectionParams> update_selection(const SelectionParams& theta,
                                                std::span<const double> grad, int reward,
                                                double lr_alpha,
                                                std::span<const ScoreVector> surfaced_sample,
                                                const ValidatedConstraintSpec& spec, Mode mode) {
  if (reward != 1 && reward != -1) throw Error(ErrorCode::kInvalidArgument, "reward must be +1 or -1");
  UpdateOutcome<SelectionParams> out{theta, theta, theta, {}};
  if (mode == Mode::kStatic || mode == Mode::kScalarTopK) return out;
  if (grad.size() != theta.num_coordinates()) {
    throw Error(ErrorCode::kInvalidArgument, "gradient length does not match theta");
  }
  auto coords = theta.coordinates();
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] += lr_alpha * reward * grad[i];
  out.raw.set_coordinates(coords);
  if (mode == Mode::kUnconstrainedRl) {
    out.after = out.raw;
    return out;
  }
  auto projected = project_theta(theta, out.raw, surfaced_sample, spec);
  out.after = std::move(projected.theta);
  out.clip_events = std::move(projected.clip_events);
  return out;
}

namespace {

struct SoftSelection {
  std::vector<double> clamped;
  std::vector<double> z;  // standardised deviations; empty when the clamp is inactive
  std::vector<double> q;
  double expected = 0.0;
};

SoftSelection soft_selection(const ReducerParams& phi, std::span<const double> s) {
  SoftSelection out;
  out.clamped = variance_clamp(s, phi.variance_clamp);
  const double sd = population_std(s);
  if (sd > phi.variance_clamp) {
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    for (double x : s) out.z.push_back((x - mean) / sd);
  }
  out.q = policy(out.clamped, 1.0);
  for (std::size_t i = 0; i < s.size(); ++i) out.expected += out.q[i] * out.clamped[i];
  return out;
}

}  // namespace

double selection_surrogate(const ReducerParams& phi, std::span<const double> surfaced_scores) {
  return soft_selection(phi, surfaced_scores).expected - phi.exploration_coeff * phi.score_threshold;
}

SurrogateGradient selection_surrogate_grad(const ReducerParams& phi,
                                           std::span<const double> surfaced_scores) {
  const auto sel = soft_selection(phi, surfaced_scores);
  SurrogateGradient g;
  g.score_threshold = -phi.exploration_coeff;
  g.exploration_coeff = -phi.score_threshold;
  // c_i = mean + sigma * z_i while the clamp is active;
  // d/dc_i sum_j q_j c_j = q_i * (1 + c_i - E_q[c]).
  for (std::size_t i = 0; i < sel.z.size(); ++i) {
    g.variance_clamp += sel.q[i] * (1.0 + sel.clamped[i] - sel.expected) * sel.z[i];
  }
  return g;
}

UpdateOutcome<ReducerParams> update_reducer(const ReducerParams& phi, int reward, double lr_beta,
                                            std::span<const double> surfaced_scores,
                                            const ValidatedConstraintSpec& spec, Mode mode) {
  if (reward != 1 && reward != -1) throw Error(ErrorCode::kInvalidArgument, "reward must be +1 or -1");
  UpdateOutcome<ReducerParams> out{phi, phi, phi, {}};
  if (mode == Mode::kStatic || mode == Mode::kScalarTopK) return out;
  const auto g = selection_surrogate_grad(phi, surfaced_scores);
  const double step = lr_beta * reward;
  out.raw.score_threshold += step * g.score_threshold;
  out.raw.variance_clamp = std::max(kSigmaFloor, out.raw.variance_clamp + step * g.variance_clamp);
  out.raw.exploration_coeff += step * g.exploration_coeff;
  if (mode == Mode::kUnconstrainedRl) {
    out.after = out.raw;
    return out;
  }
  auto projected = project_phi(out.raw, spec);
  out.after = projected.phi;
  out.clip_events = std::move(projected.clip_events);
  return out;
}

}  // namespace selgov
