// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "safecomb/cluster/hdbscan.hpp"

namespace safecomb::cluster {

inline constexpr const char* kModelFormat = "safecomb.cluster_model";
inline constexpr int kModelVersion = 1;

nlohmann::json params_to_json(const ClusterParams& params);
ClusterParams params_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const ClusterModel& model);
/// Throws DataError on a wrong format tag or version.
ClusterModel model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const ClusterModel& model);
ClusterModel load_model(const std::filesystem::path& path);

}  // namespace safecomb::cluster
