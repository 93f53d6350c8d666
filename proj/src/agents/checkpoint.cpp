#include "drl/agents/checkpoint.hpp"

#include <exception>

#include "drl/core/errors.hpp"

namespace drl::agents {

void write_agent_config(ByteWriter& w, const AgentConfig& c) {
  w.i64(c.d);
  w.i64(c.p);
  w.i64(c.f);
  w.f64(c.gamma);
  w.f64(c.rho_bar);
  w.f64(c.c_bar);
  w.f64(c.entropy_weight);
  w.f64(c.value_weight);
  w.f64(c.model_weight);
  w.i64(c.unroll);
  w.i64(c.model_unroll);
  w.i64(c.hidden);
  w.i64(c.layers);
  w.i64(c.predictor.gru_hidden);
  w.i64(c.predictor.head_hidden);
  w.f64(c.adam.lr);
  w.f64(c.adam.beta1);
  w.f64(c.adam.beta2);
  w.f64(c.adam.eps);
  w.f64(c.adam.clip_norm);
}

AgentConfig read_agent_config(ByteReader& r) {
  AgentConfig c;
  c.d = static_cast<int>(r.i64());
  c.p = static_cast<int>(r.i64());
  c.f = static_cast<int>(r.i64());
  c.gamma = r.f64();
  c.rho_bar = r.f64();
  c.c_bar = r.f64();
  c.entropy_weight = r.f64();
  c.value_weight = r.f64();
  c.model_weight = r.f64();
  c.unroll = static_cast<int>(r.i64());
  c.model_unroll = static_cast<int>(r.i64());
  c.hidden = static_cast<int>(r.i64());
  c.layers = static_cast<int>(r.i64());
  c.predictor.gru_hidden = static_cast<int>(r.i64());
  c.predictor.head_hidden = static_cast<int>(r.i64());
  c.adam.lr = r.f64();
  c.adam.beta1 = r.f64();
  c.adam.beta2 = r.f64();
  c.adam.eps = r.f64();
  c.adam.clip_norm = r.f64();
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  Archive ar;
  {
    ByteWriter w;
    write_schema(w, ckpt.schema);
    w.u32(static_cast<std::uint32_t>(ckpt.n_actions));
    ar.put("SCHM", w.take());
  }
  {
    ByteWriter w;
    write_agent_config(w, ckpt.config);
    ar.put("ACFG", w.take());
  }
  {
    ByteWriter w;
    w.f64s(ckpt.params);
    ar.put("PARM", w.take());
  }
  {
    ByteWriter w;
    w.i64(ckpt.adam_steps);
    w.f64s(ckpt.adam_m);
    w.f64s(ckpt.adam_v);
    ar.put("ADAM", w.take());
  }
  {
    ByteWriter w;
    w.i64(ckpt.meta.step);
    w.str(ckpt.meta.env);
    w.str(ckpt.meta.ruleset);
    w.str(ckpt.meta.code_version);
    w.str(ckpt.meta.config_hash);
    w.u64(ckpt.meta.seed);
    ar.put("META", w.take());
  }
  ar.save(path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const Archive ar = Archive::load(path);
  Checkpoint c;
  try {
    {
      ByteReader r(ar.get("SCHM"));
      c.schema = read_schema(r);
      c.n_actions = static_cast<int>(r.u32());
    }
    {
      ByteReader r(ar.get("ACFG"));
      c.config = read_agent_config(r);
    }
    {
      ByteReader r(ar.get("PARM"));
      c.params = r.f64s();
    }
    {
      ByteReader r(ar.get("ADAM"));
      c.adam_steps = r.i64();
      c.adam_m = r.f64s();
      c.adam_v = r.f64s();
    }
    {
      ByteReader r(ar.get("META"));
      c.meta.step = r.i64();
      c.meta.env = r.str();
      c.meta.ruleset = r.str();
      c.meta.code_version = r.str();
      c.meta.config_hash = r.str();
      c.meta.seed = r.u64();
    }
    c.schema.validate();
    const AgentNets nets(c.schema, c.n_actions, c.config);
    require(c.params.size() == nets.n_params(), "parameter count does not match the stored config");
    require(c.adam_m.size() == c.params.size() && c.adam_v.size() == c.params.size(),
            "optimizer state does not match the parameters");
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError("checkpoint " + path.string() + ": " + e.what());
  }
  return c;
}

void require_compatible(const Checkpoint& ckpt, const StateSchema& schema, int n_actions, const std::string& what) {
  if (!(ckpt.schema == schema) || ckpt.n_actions != n_actions) {
    throw UsageError(what + ": checkpoint was built for a different environment schema (env '" + ckpt.meta.env +
                     "')");
  }
}

}  // namespace drl::agents
