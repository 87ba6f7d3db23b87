// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/cluster/model_io.hpp"

#include <fstream>

#include "safecomb/error.hpp"

namespace safecomb::cluster {

using nlohmann::json;

json params_to_json(const ClusterParams& p) {
  return json{{"min_cluster_size", p.min_cluster_size},
              {"min_samples", p.min_samples},
              {"metric", "euclidean"},
              {"subsample_size", p.subsample_size},
              {"distance_floor", p.distance_floor},
              {"collapse_duplicates", p.collapse_duplicates},
              {"seed", p.seed}};
}

ClusterParams params_from_json(const json& j) {
  ClusterParams p;
  if (!j.is_object()) throw UsageError("cluster params must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "min_cluster_size") p.min_cluster_size = value.get<int>();
    else if (key == "min_samples") p.min_samples = value.get<int>();
    else if (key == "metric") {
      if (value.get<std::string>() != "euclidean") throw UsageError("unsupported metric: " + value.get<std::string>());
    } else if (key == "subsample_size") p.subsample_size = value.get<std::size_t>();
    else if (key == "distance_floor") p.distance_floor = value.get<double>();
    else if (key == "collapse_duplicates") p.collapse_duplicates = value.get<bool>();
    else if (key == "seed") p.seed = value.get<std::uint64_t>();
    else if (key == "workers") p.workers = value.get<unsigned>();
    else throw UsageError("unknown cluster parameter: " + key);
  }
  return p;
}

json model_to_json(const ClusterModel& m) {
  json points = json::array();
  for (std::size_t p = 0; p < m.points.size(); ++p)
    points.push_back({m.points[p].bits(), m.weights[p], m.core_sq[p], m.point_labels[p], m.point_strengths[p],
                      m.point_lambdas[p]});
  json tree = json::array();
  for (const auto& r : m.tree) tree.push_back({r.parent, r.child, r.lambda, r.child_size});
  json clusters = json::array();
  for (const auto& c : m.clusters) {
    json ex = json::array();
    for (auto v : c.exemplars) ex.push_back(v.to_bitstring());
    clusters.push_back({{"label", c.label},
                        {"node", c.node},
                        {"lambda_birth", c.lambda_birth},
                        {"lambda_death", c.lambda_death},
                        {"size", c.size},
                        {"exemplars", ex}});
  }
  return json{{"format", kModelFormat},
              {"version", kModelVersion},
              {"params", params_to_json(m.params)},
              {"corpus_size", m.corpus_size},
              {"fitted_indices", m.fitted_indices},
              {"fitted_point", m.fitted_point},
              {"points", points},
              {"root_node", m.root_node},
              {"tree", tree},
              {"clusters", clusters}};
}

ClusterModel model_from_json(const json& j) {
  try {
    if (j.value("format", "") != kModelFormat) throw DataError("not a cluster model file");
    if (j.at("version").get<int>() != kModelVersion)
      throw DataError("unsupported cluster model version " + j.at("version").dump());
    ClusterModel m;
    m.params = params_from_json(j.at("params"));
    m.corpus_size = j.at("corpus_size").get<std::size_t>();
    m.fitted_indices = j.at("fitted_indices").get<std::vector<std::size_t>>();
    m.fitted_point = j.at("fitted_point").get<std::vector<int>>();
    for (const auto& p : j.at("points")) {
      m.points.emplace_back(p.at(0).get<std::uint32_t>());
      m.weights.push_back(p.at(1).get<std::size_t>());
      m.core_sq.push_back(p.at(2).get<int>());
      m.point_labels.push_back(p.at(3).get<int>());
      m.point_strengths.push_back(p.at(4).get<double>());
      m.point_lambdas.push_back(p.at(5).get<double>());
    }
    m.root_node = j.at("root_node").get<int>();
    for (const auto& r : j.at("tree"))
      m.tree.push_back({r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<double>(), r.at(3).get<std::size_t>()});
    for (const auto& c : j.at("clusters")) {
      SelectedCluster sc;
      sc.label = c.at("label").get<int>();
      sc.node = c.at("node").get<int>();
      sc.lambda_birth = c.at("lambda_birth").get<double>();
      sc.lambda_death = c.at("lambda_death").get<double>();
      sc.size = c.at("size").get<std::size_t>();
      for (const auto& e : c.at("exemplars")) sc.exemplars.push_back(FeatureVector::from_bitstring(e.get<std::string>()));
      m.clusters.push_back(std::move(sc));
    }
    for (int l : m.point_labels)
      if (l != kNoise && (l < 0 || l >= static_cast<int>(m.clusters.size())))
        throw DataError("cluster model has an out-of-range point label");
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed cluster model: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed cluster model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ClusterModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << model_to_json(model).dump(1) << '\n';
}

ClusterModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace safecomb::cluster
