#pragma once

#include <json.hpp>

#include "eventcast/dataset.hpp"
#include "eventcast/discretizer.hpp"
#include "eventcast/event_space.hpp"
#include "eventcast/learners.hpp"

// nlohmann adapters for the persisted types.
namespace eventcast {

void to_json(nlohmann::json& j, const FeatureMeta& meta);
void from_json(const nlohmann::json& j, FeatureMeta& meta);
void to_json(nlohmann::json& j, const DiscretizerState& state);
void from_json(const nlohmann::json& j, DiscretizerState& state);
void to_json(nlohmann::json& j, const LearnerParams& params);
void from_json(const nlohmann::json& j, LearnerParams& params);
void to_json(nlohmann::json& j, const Tree& tree);
void from_json(const nlohmann::json& j, Tree& tree);
void to_json(nlohmann::json& j, const EventSpaceSpec& spec);
void from_json(const nlohmann::json& j, EventSpaceSpec& spec);

}  // namespace eventcast
