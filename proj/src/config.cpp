#include "nsmem/config.hpp"

#include <charconv>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace nsmem {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("config: " + msg);
}

void check_keys(const json& obj, const std::string& section,
                const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key()))
      fail("unknown key \"" + (section.empty() ? it.key() : section + "." + it.key()) + "\"");
  }
}

template <typename T>
void read(const json& obj, const std::string& section, const char* key,
          T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail("bad value for \"" +
         (section.empty() ? std::string(key) : section + "." + key) + "\"");
  }
}

void read_bump(const json& obj, const std::string& section, BumpSpec& b) {
  check_keys(obj, section, {"amplitude", "width", "center"});
  read(obj, section, "amplitude", b.amplitude);
  read(obj, section, "width", b.width);
  if (obj.contains("center")) {
    const auto& c = obj.at("center");
    if (!c.is_array() || c.size() != 2) fail(section + ".center must be [x, y]");
    b.x_c = c[0].get<double>();
    b.y_c = c[1].get<double>();
  }
}

}  // namespace

SimConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("parse error: ") + e.what());
  }
  if (!root.is_object()) fail("top level must be an object");
  check_keys(root, "", {"schema_version", "grid", "kernel", "physics", "noise",
                        "integration", "experiment"});
  SimConfig cfg;
  read(root, "", "schema_version", cfg.schema_version);
  if (cfg.schema_version != 1) fail("unsupported schema_version");

  if (root.contains("grid")) {
    const auto& s = root.at("grid");
    check_keys(s, "grid", {"L", "N"});
    read(s, "grid", "L", cfg.grid.L);
    read(s, "grid", "N", cfg.grid.N);
  }
  if (root.contains("kernel")) {
    const auto& s = root.at("kernel");
    check_keys(s, "kernel", {"delta", "s_max", "nodes", "gamma"});
    read(s, "kernel", "delta", cfg.kernel.delta);
    read(s, "kernel", "s_max", cfg.kernel.s_max);
    read(s, "kernel", "nodes", cfg.kernel.nodes);
    read(s, "kernel", "gamma", cfg.kernel.gamma);
  }
  if (root.contains("physics")) {
    const auto& s = root.at("physics");
    check_keys(s, "physics", {"nu", "forcing", "noise_profile"});
    read(s, "physics", "nu", cfg.physics.nu);
    if (s.contains("forcing"))
      read_bump(s.at("forcing"), "physics.forcing", cfg.physics.forcing);
    if (s.contains("noise_profile"))
      read_bump(s.at("noise_profile"), "physics.noise_profile",
                cfg.physics.noise_profile);
  }
  if (root.contains("noise")) {
    const auto& s = root.at("noise");
    check_keys(s, "noise", {"seed", "sigma", "epsilon"});
    read(s, "noise", "seed", cfg.noise.seed);
    read(s, "noise", "sigma", cfg.noise.sigma);
    read(s, "noise", "epsilon", cfg.noise.epsilon);
  }
  if (root.contains("integration")) {
    const auto& s = root.at("integration");
    check_keys(s, "integration", {"dt", "t_end", "sample_every", "per_step_series"});
    read(s, "integration", "dt", cfg.integration.dt);
    read(s, "integration", "t_end", cfg.integration.t_end);
    read(s, "integration", "sample_every", cfg.integration.sample_every);
    read(s, "integration", "per_step_series", cfg.integration.per_step_series);
  }
  if (root.contains("experiment")) {
    const auto& s = root.at("experiment");
    check_keys(s, "experiment",
               {"members", "pullback_T", "radius", "eps_list", "seeds", "tol",
                "max_doublings"});
    read(s, "experiment", "members", cfg.experiment.members);
    read(s, "experiment", "pullback_T", cfg.experiment.pullback_T);
    read(s, "experiment", "radius", cfg.experiment.radius);
    read(s, "experiment", "eps_list", cfg.experiment.eps_list);
    read(s, "experiment", "seeds", cfg.experiment.seeds);
    read(s, "experiment", "tol", cfg.experiment.tol);
    read(s, "experiment", "max_doublings", cfg.experiment.max_doublings);
  }

  if (!(cfg.integration.dt > 0.0)) fail("integration.dt must be positive");
  if (cfg.integration.sample_every < 1) fail("integration.sample_every must be >= 1");
  if (!(cfg.physics.nu > 0.0)) fail("physics.nu must be positive");
  if (!(cfg.noise.sigma > 0.0)) fail("noise.sigma must be positive");
  if (cfg.noise.epsilon < 0.0) fail("noise.epsilon must be nonnegative");
  return cfg;
}

std::string dump_config(const SimConfig& cfg) {
  json root;
  root["schema_version"] = cfg.schema_version;
  root["grid"] = {{"L", cfg.grid.L}, {"N", cfg.grid.N}};
  root["kernel"] = {{"delta", cfg.kernel.delta},
                    {"s_max", cfg.kernel.s_max},
                    {"nodes", cfg.kernel.nodes},
                    {"gamma", cfg.kernel.gamma}};
  auto bump = [](const BumpSpec& b) {
    return json{{"amplitude", b.amplitude},
                {"width", b.width},
                {"center", {b.x_c, b.y_c}}};
  };
  root["physics"] = {{"nu", cfg.physics.nu},
                     {"forcing", bump(cfg.physics.forcing)},
                     {"noise_profile", bump(cfg.physics.noise_profile)}};
  root["noise"] = {{"seed", cfg.noise.seed},
                   {"sigma", cfg.noise.sigma},
                   {"epsilon", cfg.noise.epsilon}};
  root["integration"] = {{"dt", cfg.integration.dt},
                         {"t_end", cfg.integration.t_end},
                         {"sample_every", cfg.integration.sample_every},
                         {"per_step_series", cfg.integration.per_step_series}};
  root["experiment"] = {{"members", cfg.experiment.members},
                        {"pullback_T", cfg.experiment.pullback_T},
                        {"radius", cfg.experiment.radius},
                        {"eps_list", cfg.experiment.eps_list},
                        {"seeds", cfg.experiment.seeds},
                        {"tol", cfg.experiment.tol},
                        {"max_doublings", cfg.experiment.max_doublings}};
  return root.dump(2) + "\n";
}

std::vector<std::string> apply_env_overrides(SimConfig& cfg) {
  std::vector<std::string> applied;
  if (const char* s = std::getenv("NSMEM_SEED")) {
    cfg.noise.seed = std::strtoull(s, nullptr, 10);
    applied.push_back("NSMEM_SEED");
  }
  if (const char* s = std::getenv("NSMEM_EPSILON")) {
    cfg.noise.epsilon = std::strtod(s, nullptr);
    applied.push_back("NSMEM_EPSILON");
  }
  return applied;
}

}  // namespace nsmem
