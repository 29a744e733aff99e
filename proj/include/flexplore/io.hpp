#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexplore/classifier.hpp"
#include "flexplore/env.hpp"
#include "flexplore/explorer.hpp"
#include "flexplore/planner.hpp"

namespace flexplore {

using Json = nlohmann::json;

/// Input that fails to parse against a documented schema.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

Pose pose_from_json(const Json& j);
Json pose_to_json(const Pose& z);

Scene scene_from_json(const Json& j);
Json scene_to_json(const Scene& scene);

/// Resolve a scenario reference: builtin name, {"name", "params"},
/// {"file": path}, or an inline scene object.
Scene resolve_scenario(const Json& ref, const std::string& base_dir);

struct RunConfig {
    Scene scene;
    Pose start;  // defaults to the scene equilibrium pose
    Pose goal;
    PlannerConfig planner;
    ExplorerConfig explorer;
    SensorModel sensor;
    std::vector<Pose> script;  // explore pose sequence
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool explore_during_plan = false;
};

RunConfig run_config_from_json(const Json& j, const std::string& base_dir);
RunConfig load_run_config(const std::string& path);

PlannerConfig planner_config_from_json(const Json& j);
ExplorerConfig explorer_config_from_json(const Json& j);
ClassifierThresholds thresholds_from_json(const Json& j);
SensorModel sensor_model_from_json(const Json& j);

/// Eigendata or stiffness-matrix input for identification:
/// {"screws": [[6]...], "lambdas": [...]} or {"K": [[6]x6]}.
Constraint constraint_from_identify_json(const Json& j);

Json label_to_json(const ConstraintLabel& label);
Json constraint_to_json(const Constraint& c);
Json atlas_to_json(const Explorer& explorer);

void write_steps_csv(const std::string& path, const std::vector<StepLog>& log);
Json summary_to_json(const RunResult& result, const RunConfig& cfg);

void write_text_file(const std::string& path, const std::string& content);
Json load_json_file(const std::string& path);

}  // namespace flexplore
