#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "drl/agents/agent.hpp"
#include "drl/core/serialize.hpp"

namespace drl::agents {

struct CheckpointMeta {
  std::int64_t step = 0;  // agent steps consumed when the snapshot was taken
  std::string env;
  std::string ruleset;
  std::string code_version;
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// Everything needed to rebuild an agent and resume its optimizer.
struct Checkpoint {
  StateSchema schema;
  int n_actions = 0;
  AgentConfig config;
  std::vector<double> params;
  std::int64_t adam_steps = 0;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  CheckpointMeta meta;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Reads and validates a checkpoint (parameter count must match the network
/// the stored config describes). Throws UsageError on malformed files.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws UsageError when the checkpoint was built for another schema or
/// action count.
void require_compatible(const Checkpoint& ckpt, const StateSchema& schema, int n_actions,
                        const std::string& what);

void write_agent_config(ByteWriter& w, const AgentConfig& c);
AgentConfig read_agent_config(ByteReader& r);

}  // namespace drl::agents
