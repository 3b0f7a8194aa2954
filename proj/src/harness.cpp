#include "selgov/harness.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "selgov/error.hpp"
#include "selgov/evaluator.hpp"
#include "selgov/learning.hpp"
#include "selgov/reducer.hpp"
#include "selgov/rng.hpp"
#include "selgov/scoring.hpp"

namespace selgov {

namespace {

// Per-variant state that never depends on theta, phi or the reward history.
struct VariantWorld {
  TaskContext context;
  CandidatePool pool;
  ScoreVector pool_features;                // one entry per pool member, scores unset
  std::vector<std::size_t> filtered_index;  // positions into pool_features
  bool blocked = false;
};

struct World {
  const Fixtures& fixtures;
  const ScenarioSpec& scenario;
  Evaluator evaluator;
  ValidatedConstraintSpec constraints;
  std::vector<VariantWorld> variants;

  World(const RunConfig& cfg, const Fixtures& fx)
      : fixtures(fx),
        scenario(fx.scenario(cfg.scenario)),
        evaluator(scenario, cfg.cefl.embed_dim, cfg.cefl.hash_seed),
        constraints(validate_constraint_spec(cfg.constraints, fx.roster.size())) {
    validate_cefl_config(cfg.cefl, fx.roster.size());
    validate_scenario(scenario, fx.roster, cfg.cefl.embed_dim, cfg.cefl.hash_seed);
    const auto zero = make_selection_params(fx.roster.size(), {0, 0, 0, 0}, 1.0);
    std::vector<CandidatePool> pools;
    for (int v = 0; v < static_cast<int>(scenario.variants.size()); ++v) {
      VariantWorld vw;
      vw.context = make_context(scenario, v, 0, cfg.cefl.embed_dim, cfg.cefl.hash_seed);
      vw.pool = expand_and_freeze(vw.context, fx.roster, cfg.cefl);
      for (std::size_t m : vw.pool.members) {
        const auto emb = agent_embedding(fx.roster[m], cfg.cefl.embed_dim, cfg.cefl.hash_seed);
        vw.pool_features.push_back(score_agent(fx.roster[m], m, emb, vw.context, zero));
      }
      for (std::size_t i = 0; i < vw.pool.members.size(); ++i) {
        if (fx.roster[vw.pool.members[i]].has_tag(scenario.required_tag)) vw.filtered_index.push_back(i);
      }
      vw.blocked = vw.filtered_index.empty();
      pools.push_back(vw.pool);
      variants.push_back(std::move(vw));
    }
    check_exposure(pools, fx.roster, scenario_name(cfg.scenario));
  }

  ScoreVector filtered_scores(const VariantWorld& vw, const SelectionParams& theta) const {
    ScoreVector out;
    out.reserve(vw.filtered_index.size());
    for (std::size_t i : vw.filtered_index) out.push_back(vw.pool_features[i]);
    return rescore(out, theta);
  }
};

struct Surfaced {
  ScoreVector set;
  std::vector<ClipEvent> events;
};

Surfaced surface_variant(const World& w, const VariantWorld& vw, const SelectionParams& theta,
                         const ReducerParams& phi, Mode mode) {
  if (vw.blocked) return {};
  const auto filtered = w.filtered_scores(vw, theta);
  if (mode == Mode::kScalarTopK) {
    return {ScoreVector{filtered[scalar_topk_surface(filtered)]}, {}};
  }
  const auto raw = scores_of(filtered);
  const auto clamped = variance_clamp(raw, phi.variance_clamp);
  auto res = surface(filtered, clamped, phi);
  return {select_positions(filtered, res.positions), std::move(res.clip_events)};
}

struct Snapshot {
  std::vector<VariantPolicy> policies;
  std::vector<ScoreVector> sets;
};

Snapshot take_snapshot(const World& w, const SelectionParams& theta, const ReducerParams& phi, Mode mode) {
  Snapshot snap;
  for (std::size_t v = 0; v < w.variants.size(); ++v) {
    auto s = surface_variant(w, w.variants[v], theta, phi, mode);
    VariantPolicy vp;
    vp.variant = static_cast<int>(v);
    for (const auto& c : s.set) vp.agents.push_back(c.agent);
    if (!s.set.empty()) vp.probabilities = policy(s.set, theta);
    snap.policies.push_back(std::move(vp));
    snap.sets.push_back(std::move(s.set));
  }
  return snap;
}

std::size_t sample_index(std::span<const double> probs, double u) {
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return i;
  }
  return probs.size() - 1;
}

template <typename T>
std::vector<T> concat(std::vector<T> a, const std::vector<T>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

std::vector<double> sc_series_from_log(const RunHeader& header, const AuditLog& log) {
  const std::size_t n = header.roster_ids.size();
  std::vector<double> sc;
  sc.reserve(log.size() + 1);
  sc.push_back(selection_concentration(header.initial_snapshot, n));
  for (const auto& r : log.records()) sc.push_back(selection_concentration(r.policy_snapshot, n));
  return sc;
}

RunSummary summarize(const RunHeader& header, const AuditLog& log) {
  RunSummary s;
  s.scenario = header.config.scenario;
  s.mode = header.config.mode;
  s.lr = header.config.lr_alpha;
  const auto sc = sc_series_from_log(header, log);
  s.sc_0 = sc.front();
  s.sc_T = sc.back();
  s.rsc = rsc(s.sc_0, s.sc_T);
  if (!log.empty()) {
    double total = 0.0;
    for (const auto& r : log.records()) total += r.reward;
    s.mean_reward = total / static_cast<double>(log.size());
    const std::span<const double> steps(sc.begin() + 1, sc.end());
    s.mean_sc = mean(steps);
    s.var_sc = population_variance(steps);
    s.gd_dynamic = governance_debt(log);
  } else {
    s.mean_sc = s.sc_0;
  }
  if (header.paired_unconstrained_var_sc) {
    s.gsi = gsi_or_undefined(s.var_sc, *header.paired_unconstrained_var_sc);
  }
  return s;
}

EpisodeResult run_episode(const RunConfig& cfg, const Fixtures& fixtures,
                          std::optional<double> paired_unconstrained_var) {
  const World world(cfg, fixtures);
  const auto& roster = fixtures.roster;
  const Mode mode = cfg.mode;

  EpisodeResult result;
  RunHeader& header = result.header;
  header.config = cfg;
  for (const auto& a : roster) header.roster_ids.push_back(a.id());

  // theta_0 in C and phi_0 in G before the loop starts.
  auto phi0 = project_phi(cfg.initial_phi, world.constraints);
  const auto theta_init = make_selection_params(roster.size(), cfg.initial_weights, cfg.temperature);
  const auto initial_sets = take_snapshot(world, theta_init, phi0.phi, mode).sets;
  auto zero = theta_init;
  zero.set_coordinates(std::vector<double>(zero.num_coordinates(), 0.0));
  auto theta0 = project_theta(zero, theta_init, initial_sets, world.constraints);
  header.theta_0 = theta0.theta;
  header.phi_0 = phi0.phi;
  header.initial_clip_events = concat(phi0.clip_events, theta0.clip_events);

  SelectionParams theta = header.theta_0;
  ReducerParams phi = header.phi_0;
  auto snapshot = take_snapshot(world, theta, phi, mode);
  header.initial_snapshot = snapshot.policies;

  const std::string scen(scenario_name(cfg.scenario));
  Rng context_rng(derive_seed(cfg.seed, scen + "/contexts"));
  Rng selection_rng(derive_seed(cfg.seed, scen + "/" + std::string(mode_name(mode)) + "/selection"));

  std::deque<bool> window;
  std::size_t throttle_left = 0;

  for (std::size_t step = 0; step < cfg.horizon; ++step) {
    AuditRecord rec;
    rec.step = step;
    rec.context = sample_context(world.scenario, context_rng, step + 1, cfg.cefl.embed_dim, cfg.cefl.hash_seed);
    const VariantWorld& vw = world.variants[static_cast<std::size_t>(rec.context.variant)];
    rec.candidate_pool = vw.pool.members;
    for (const auto& c : rescore(vw.pool_features, theta)) rec.scores.push_back(c.score);
    rec.lr_scale = throttle_left > 0 ? cfg.throttle.factor : 1.0;
    if (throttle_left > 0) --throttle_left;
    const double u = selection_rng.uniform01();

    if (vw.blocked) {
      rec.clip_events.push_back({"candidate_pool", static_cast<double>(vw.pool.members.size()), 0.0,
                                 "hard_constraints"});
    } else {
      for (std::size_t i : vw.filtered_index) rec.filtered_pool.push_back(vw.pool.members[i]);
      auto surfaced = surface_variant(world, vw, theta, phi, mode);
      rec.clip_events = surfaced.events;
      const ScoreVector& S = surfaced.set;
      for (const auto& c : S) rec.surfaced.push_back(c.agent);
      rec.policy = policy(S, theta);
      const std::size_t k = sample_index(rec.policy, u);
      const AgentProfile& agent = roster[S[k].agent];
      rec.chosen = S[k].agent;
      rec.output = agent.id() + ":" + scen + "/variant-" + std::to_string(rec.context.variant);
      rec.reward = world.evaluator.evaluate(agent, rec.context);

      const auto grad = log_policy_grad(S, theta, k);
      auto sel = update_selection(theta, grad, rec.reward, cfg.lr_alpha * rec.lr_scale, snapshot.sets,
                                  world.constraints, mode);
      auto red = update_reducer(phi, rec.reward, cfg.lr_beta * rec.lr_scale, scores_of(S),
                                world.constraints, mode);
      theta = std::move(sel.after);
      phi = red.after;
      rec.clip_events.insert(rec.clip_events.end(), sel.clip_events.begin(), sel.clip_events.end());
      rec.clip_events.insert(rec.clip_events.end(), red.clip_events.begin(), red.clip_events.end());
      rec.post_update_policy = policy(rescore(S, theta), theta);
    }

    const bool clipped = !rec.clip_events.empty();
    window.push_back(clipped);
    if (window.size() > cfg.throttle.window) window.pop_front();
    if (vw.blocked) {
      rec.fail_loud_action = FailLoudAction::kBlock;
    } else if (clipped) {
      const auto dense = static_cast<std::size_t>(std::count(window.begin(), window.end(), true));
      if (dense >= cfg.throttle.threshold) {
        rec.fail_loud_action = FailLoudAction::kThrottle;
        throttle_left = cfg.throttle.duration;
      } else {
        rec.fail_loud_action = FailLoudAction::kAlert;
      }
    }

    rec.theta_after = theta;
    rec.phi_after = phi;
    snapshot = take_snapshot(world, theta, phi, mode);
    rec.policy_snapshot = snapshot.policies;
    validate_record(rec);
    result.log.append(std::move(rec));
  }

  result.sc_series = sc_series_from_log(header, result.log);
  result.top_share_series = top_agent_share_series(selection_history(result.log));
  if (paired_unconstrained_var) {
    header.paired_unconstrained_var_sc = paired_unconstrained_var;
  } else if (mode == Mode::kUnconstrainedRl && result.sc_series.size() > 1) {
    header.paired_unconstrained_var_sc =
        population_variance(std::span<const double>(result.sc_series).subspan(1));
  }
  result.summary = summarize(header, result.log);
  return result;
}

EpisodeResult run_paired_episode(const RunConfig& cfg, const Fixtures& fixtures) {
  if (cfg.mode == Mode::kUnconstrainedRl) return run_episode(cfg, fixtures);
  RunConfig paired = cfg;
  paired.mode = Mode::kUnconstrainedRl;
  const auto reference = run_episode(paired, fixtures);
  return run_episode(cfg, fixtures, reference.summary.var_sc);
}

RunSummary average_summaries(const std::vector<RunSummary>& runs) {
  RunSummary out;
  if (runs.empty()) return out;
  out.scenario = runs.front().scenario;
  out.mode = runs.front().mode;
  out.lr = runs.front().lr;
  const double n = static_cast<double>(runs.size());
  double gsi_sum = 0.0;
  std::size_t gsi_n = 0;
  for (const auto& r : runs) {
    out.mean_reward += r.mean_reward / n;
    out.mean_sc += r.mean_sc / n;
    out.sc_0 += r.sc_0 / n;
    out.sc_T += r.sc_T / n;
    out.rsc += r.rsc / n;
    out.var_sc += r.var_sc / n;
    out.gd_dynamic += r.gd_dynamic / n;
    if (r.gsi) {
      gsi_sum += *r.gsi;
      ++gsi_n;
    }
  }
  if (gsi_n > 0) out.gsi = gsi_sum / static_cast<double>(gsi_n);
  return out;
}

std::vector<SweepCell> run_sweep(const SweepConfig& cfg, const Fixtures& fixtures) {
  if (cfg.seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "sweep needs at least one seed");
  std::vector<std::uint64_t> seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  // Unconstrained runs are always executed: they are the GSI reference.
  std::vector<Mode> run_modes = cfg.modes;
  if (std::find(run_modes.begin(), run_modes.end(), Mode::kUnconstrainedRl) == run_modes.end()) {
    run_modes.push_back(Mode::kUnconstrainedRl);
  }

  struct Job {
    Scenario scenario;
    Mode mode;
    double lr;
    std::uint64_t seed;
  };
  struct JobResult {
    std::optional<EpisodeResult> episode;
    std::string error;
  };
  std::vector<Job> jobs;
  for (Scenario s : cfg.scenarios)
    for (Mode m : run_modes)
      for (double lr : cfg.lrs)
        for (std::uint64_t seed : seeds) jobs.push_back({s, m, lr, seed});

  std::vector<JobResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      RunConfig rc = cfg.base;
      rc.scenario = jobs[i].scenario;
      rc.mode = jobs[i].mode;
      rc.lr_alpha = rc.lr_beta = jobs[i].lr;
      rc.seed = jobs[i].seed;
      try {
        results[i].episode = run_episode(rc, fixtures);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  auto find_job = [&](Scenario s, Mode m, double lr, std::uint64_t seed) -> JobResult& {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].scenario == s && jobs[i].mode == m && jobs[i].lr == lr && jobs[i].seed == seed) return results[i];
    }
    throw Error(ErrorCode::kIndexOutOfRange, "sweep job missing");
  };

  std::vector<SweepCell> cells;
  for (Scenario s : cfg.scenarios) {
    for (Mode m : cfg.modes) {
      for (double lr : cfg.lrs) {
        SweepCell cell;
        cell.scenario = s;
        cell.mode = m;
        cell.lr = lr;
        for (std::uint64_t seed : seeds) {
          JobResult& jr = find_job(s, m, lr, seed);
          if (!jr.episode) {
            cell.errors.push_back("seed " + std::to_string(seed) + ": " + jr.error);
            continue;
          }
          EpisodeResult& ep = *jr.episode;
          if (m != Mode::kUnconstrainedRl) {
            const JobResult& ref = find_job(s, Mode::kUnconstrainedRl, lr, seed);
            if (ref.episode) {
              ep.header.paired_unconstrained_var_sc = ref.episode->summary.var_sc;
              ep.summary.gsi = gsi_or_undefined(ep.summary.var_sc, ref.episode->summary.var_sc);
            }
          }
          cell.seeds.push_back(seed);
          cell.per_seed.push_back(ep.summary);
          if (cell.sc_trajectory.empty()) {
            cell.sc_trajectory.assign(ep.sc_series.size(), 0.0);
            cell.top_share_trajectory.assign(ep.top_share_series.size(), 0.0);
          }
          for (std::size_t t = 0; t < ep.sc_series.size(); ++t) cell.sc_trajectory[t] += ep.sc_series[t];
          for (std::size_t t = 0; t < ep.top_share_series.size(); ++t) {
            cell.top_share_trajectory[t] += ep.top_share_series[t];
          }
          if (cfg.keep_episodes) cell.episodes.push_back(ep);
        }
        const double n = static_cast<double>(cell.per_seed.size());
        for (double& x : cell.sc_trajectory) x /= n;
        for (double& x : cell.top_share_trajectory) x /= n;
        cell.summary = average_summaries(cell.per_seed);
        cell.summary.scenario = s;
        cell.summary.mode = m;
        cell.summary.lr = lr;
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

}  // namespace selgov
