#pragma once

#include <filesystem>

#include <json.hpp>

#include "avgrl/mdp.hpp"

namespace avgrl {

// JSON document layout:
//   {"num_states": S, "num_actions": A,
//    "rewards": [S*A numbers, row-major],
//    "transitions": [S*A*S numbers, row-major]}
Mdp mdp_from_json(const nlohmann::json& doc);
nlohmann::json mdp_to_json(const Mdp& mdp);

Mdp load_mdp(const std::filesystem::path& path);
void save_mdp(const Mdp& mdp, const std::filesystem::path& path);

}  // namespace avgrl
