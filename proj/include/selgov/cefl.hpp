#pragma once

// Candidate expansion and freezing: the fixed, parameter-free generator of
// the per-context candidate pool. Nothing here reads selection or reducer
// parameters.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "selgov/domain.hpp"

namespace selgov {

inline constexpr std::uint64_t kDefaultHashSeed = 0x5e1ec72feULL;

struct CeflConfig {
  double overshoot = 1.4;
  std::size_t pool_size = 5;  // m
  std::size_t embed_dim = kEmbeddingDim;
  std::uint64_t hash_seed = kDefaultHashSeed;
};

void validate_cefl_config(const CeflConfig& cfg, std::size_t num_agents);

// 64-bit token hash: FNV-1a over the bytes, xor the seed, then the
// SplitMix64 finaliser. Bucket = h % dim, sign = top bit (set -> -1).
std::uint64_t token_hash(std::string_view token, std::uint64_t seed);

// Signed feature hashing, L2-normalised unless every bucket cancels to zero.
std::vector<double> hash_embed(std::span<const std::string> tokens, std::size_t dim,
                               std::uint64_t seed);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// The 4 scalar features followed by the tag hash in the remaining dims.
std::vector<double> agent_embedding(const AgentProfile& agent, std::size_t dim, std::uint64_t seed);

// Context tokens hashed into the tag subspace; the scalar block is zero.
std::vector<double> context_embedding(const TaskContext& ctx, std::size_t dim, std::uint64_t seed);

struct CandidatePool {
  std::vector<std::size_t> members;  // roster indices, ascending (= id order)
  bool operator==(const CandidatePool&) const = default;
};

// Ranks every agent by similarity to the context (ties by id), keeps the
// top ceil(overshoot*m), then freezes the pool at the top m.
CandidatePool expand_and_freeze(const TaskContext& ctx, std::span<const AgentProfile> roster,
                                const CeflConfig& cfg);

// Throws NonExposedAgent if some roster agent appears in none of the pools.
void check_exposure(std::span<const CandidatePool> variant_pools,
                    std::span<const AgentProfile> roster, std::string_view scenario);

}  // namespace selgov
