#include "selgov/cefl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "selgov/error.hpp"

namespace selgov {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t tag_dims(std::size_t dim) {
  if (dim <= kScalarFeatures) {
    throw Error(ErrorCode::kInvalidArgument, "embedding dim must exceed the scalar block");
  }
  return dim - kScalarFeatures;
}

}  // namespace

void validate_cefl_config(const CeflConfig& cfg, std::size_t num_agents) {
  if (!(cfg.overshoot > 1.0) || !std::isfinite(cfg.overshoot)) {
    throw Error(ErrorCode::kInvalidArgument, "overshoot must be > 1");
  }
  if (cfg.pool_size < 1 || cfg.pool_size > num_agents) {
    throw Error(ErrorCode::kInvalidArgument, "pool_size must lie in [1, n]");
  }
  tag_dims(cfg.embed_dim);
}

std::uint64_t token_hash(std::string_view token, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : token) {
    h ^= c;
    h *= kFnvPrime;
  }
  return splitmix64(h ^ seed);
}

std::vector<double> hash_embed(std::span<const std::string> tokens, std::size_t dim,
                               std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "hash_embed dim must be > 0");
  std::vector<double> v(dim, 0.0);
  for (const auto& tok : tokens) {
    const std::uint64_t h = token_hash(tok, seed);
    v[h % dim] += (h >> 63) ? -1.0 : 1.0;
  }
  const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
  return v;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "cosine: length mismatch");
  const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
  const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (na * nb);
}

std::vector<double> agent_embedding(const AgentProfile& agent, std::size_t dim,
                                    std::uint64_t seed) {
  const auto scalars = agent.scalar_features();
  std::vector<double> out(scalars.begin(), scalars.end());
  const auto tags = hash_embed(agent.compliance_tags(), tag_dims(dim), seed);
  out.insert(out.end(), tags.begin(), tags.end());
  return out;
}

std::vector<double> context_embedding(const TaskContext& ctx, std::size_t dim,
                                      std::uint64_t seed) {
  std::vector<double> out(kScalarFeatures, 0.0);
  const auto toks = ctx.tokens();
  const auto h = hash_embed(toks, tag_dims(dim), seed);
  out.insert(out.end(), h.begin(), h.end());
  return out;
}

CandidatePool expand_and_freeze(const TaskContext& ctx, std::span<const AgentProfile> roster,
                                const CeflConfig& cfg) {
  if (roster.empty()) throw Error(ErrorCode::kEmptyPool, "no agents to pool");
  validate_cefl_config(cfg, roster.size());

  const auto ctx_vec = context_embedding(ctx, cfg.embed_dim, cfg.hash_seed);
  std::vector<double> sim(roster.size());
  for (std::size_t i = 0; i < roster.size(); ++i) {
    sim[i] = cosine_similarity(ctx_vec, agent_embedding(roster[i], cfg.embed_dim, cfg.hash_seed));
  }
  std::vector<std::size_t> order(roster.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sim[a] != sim[b]) return sim[a] > sim[b];
    return roster[a].id() < roster[b].id();
  });

  const auto expanded = std::min<std::size_t>(
      roster.size(), static_cast<std::size_t>(std::ceil(cfg.overshoot * static_cast<double>(cfg.pool_size))));
  order.resize(expanded);
  // freeze
  order.resize(std::min(cfg.pool_size, order.size()));
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return roster[a].id() < roster[b].id(); });
  return CandidatePool{std::move(order)};
}

void check_exposure(std::span<const CandidatePool> variant_pools,
                    std::span<const AgentProfile> roster, std::string_view scenario) {
  std::vector<bool> seen(roster.size(), false);
  for (const auto& pool : variant_pools) {
    for (std::size_t m : pool.members) seen.at(m) = true;
  }
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::kNonExposedAgent, "agent '" + roster[i].id() +
                                                   "' is in no candidate pool of scenario " +
                                                   std::string(scenario));
    }
  }
}

}  // namespace selgov
