#ifndef SIMPLEXDIR_CHAIN_IO_HPP_
#define SIMPLEXDIR_CHAIN_IO_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "simplexdir/samplers.hpp"

namespace simplexdir {

nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);
std::uint64_t spec_hash(const ModelSpec& spec);

nlohmann::json state_to_json(const ParamState& st);
ParamState state_from_json(const nlohmann::json& j);

// JSONL: one metadata header record, then one record per kept draw.
void write_chains_jsonl(const std::string& path, const ModelSpec& spec,
                        const std::vector<Chain>& chains, std::uint64_t root_seed);

struct LoadedChains {
  ModelSpec spec;
  std::vector<Chain> chains;
  nlohmann::json header;
};
LoadedChains read_chains_jsonl(const std::string& path);

// Posterior summary with per-parameter circular means and 95% credible
// intervals, location-indexed parameters averaged across locations, plus
// split-Rhat / ESS diagnostics.
nlohmann::json summarize(const ModelSpec& spec, const std::vector<Chain>& chains);

}  // namespace simplexdir

#endif
