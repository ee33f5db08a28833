#pragma once

#include "tumorgnn/sim/params.hpp"

#include <json.hpp>

namespace tumorgnn::sim {

void to_json(nlohmann::json& j, const IntrinsicParams& p);
void from_json(const nlohmann::json& j, IntrinsicParams& p);
void to_json(nlohmann::json& j, const KernelParams& p);
void from_json(const nlohmann::json& j, KernelParams& p);
void to_json(nlohmann::json& j, const GlobalParams& p);
/// Missing keys keep their defaults, so partial config objects are accepted.
void from_json(const nlohmann::json& j, GlobalParams& p);

}  // namespace tumorgnn::sim
