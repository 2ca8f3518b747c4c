#include "avgrl/mdp_io.hpp"

#include <fstream>

namespace avgrl {

using nlohmann::json;

Mdp mdp_from_json(const json& doc) {
  try {
    const int num_states = doc.at("num_states").get<int>();
    const int num_actions = doc.at("num_actions").get<int>();
    const auto rewards = doc.at("rewards").get<std::vector<double>>();
    auto transitions = doc.at("transitions").get<std::vector<double>>();
    if (num_states < 1 || num_actions < 1) {
      throw ModelError("num_states and num_actions must be positive");
    }
    if (rewards.size() != static_cast<std::size_t>(num_states) * num_actions) {
      throw ModelError("rewards must hold num_states * num_actions entries");
    }
    Matrix r(num_states, num_actions);
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a) {
        r(s, a) = rewards[static_cast<std::size_t>(s) * num_actions + a];
      }
    }
    return Mdp(num_states, num_actions, std::move(r), std::move(transitions));
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed MDP document: ") + e.what());
  }
}

json mdp_to_json(const Mdp& mdp) {
  std::vector<double> rewards;
  rewards.reserve(static_cast<std::size_t>(mdp.num_states()) *
                  mdp.num_actions());
  for (int s = 0; s < mdp.num_states(); ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      rewards.push_back(mdp.reward(s, a));
    }
  }
  return json{{"num_states", mdp.num_states()},
              {"num_actions", mdp.num_actions()},
              {"rewards", rewards},
              {"transitions", mdp.transitions()}};
}

Mdp load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ModelError("cannot open MDP file " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ModelError("cannot parse " + path.string() + ": " + e.what());
  }
  return mdp_from_json(doc);
}

void save_mdp(const Mdp& mdp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write MDP file " + path.string());
  }
  out << mdp_to_json(mdp).dump(2) << '\n';
}

}  // namespace avgrl
