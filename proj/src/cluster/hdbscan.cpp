// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The safecomb Authors

#include "safecomb/cluster/hdbscan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <map>
#include <unordered_map>

#include "safecomb/error.hpp"
#include "safecomb/parallel.hpp"
#include "safecomb/rng.hpp"
#include "safecomb/stats/stats.hpp"

namespace safecomb::cluster {

namespace {

constexpr int kMaxRadius = static_cast<int>(corpus::kCategoryCount);

// Squared Euclidean distance between 0/1 vectors is the Hamming distance, so
// all distances and core distances are handled as small integers until they
// are turned into lambdas. Ties are exact.

struct WeightedPoints {
  std::vector<FeatureVector> vectors;
  std::vector<std::size_t> weights;
  std::vector<int> point_of_row;
};

WeightedPoints collapse_points(std::span<const FeatureVector> rows, bool collapse) {
  WeightedPoints out;
  out.point_of_row.reserve(rows.size());
  if (!collapse) {
    out.vectors.assign(rows.begin(), rows.end());
    out.weights.assign(rows.size(), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) out.point_of_row.push_back(static_cast<int>(i));
    return out;
  }
  std::unordered_map<std::uint32_t, int> index;
  for (const FeatureVector& v : rows) {
    auto [it, inserted] = index.try_emplace(v.bits(), static_cast<int>(out.vectors.size()));
    if (inserted) {
      out.vectors.push_back(v);
      out.weights.push_back(0);
    }
    ++out.weights[it->second];
    out.point_of_row.push_back(it->second);
  }
  return out;
}

// Smallest Hamming radius around `v` holding `needed` weight of points.
int radius_holding(FeatureVector v, std::span<const FeatureVector> points,
                   std::span<const std::size_t> weights, std::size_t needed) {
  if (needed == 0) return 0;
  std::array<std::size_t, kMaxRadius + 1> histogram{};
  for (std::size_t j = 0; j < points.size(); ++j) histogram[corpus::hamming(v, points[j])] += weights[j];
  std::size_t total = 0;
  for (int r = 0; r <= kMaxRadius; ++r) {
    total += histogram[r];
    if (total >= needed) return r;
  }
  return kMaxRadius;
}

double effective_distance(int squared, double floor) {
  return std::max(std::sqrt(static_cast<double>(squared)), floor);
}

struct Edge {
  int a = 0;
  int b = 0;
  int mrd_sq = 0;
};

// Prim's algorithm on the dense mutual-reachability graph. Ties pick the
// lowest vertex index; the resulting level structure does not depend on
// which minimum spanning tree is found.
std::vector<Edge> minimum_spanning_tree(const std::vector<FeatureVector>& points,
                                        const std::vector<int>& core_sq, unsigned workers) {
  const std::size_t m = points.size();
  std::vector<Edge> edges;
  if (m < 2) return edges;
  edges.reserve(m - 1);
  std::vector<char> in_tree(m, 0);
  std::vector<int> best(m, std::numeric_limits<int>::max());
  std::vector<int> best_from(m, -1);

  const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(workers ? workers : default_workers(), m / 512 + 1));
  std::vector<std::pair<int, int>> shard_best(shards);
  std::size_t current = 0;
  in_tree[0] = 1;
  for (std::size_t step = 1; step < m; ++step) {
    const FeatureVector cv = points[current];
    const int ccore = core_sq[current];
    const std::size_t chunk = (m + shards - 1) / shards;
    parallel_for(shards, static_cast<unsigned>(shards), [&](std::size_t s) {
      std::pair<int, int> local{std::numeric_limits<int>::max(), -1};
      const std::size_t end = std::min(m, (s + 1) * chunk);
      for (std::size_t j = s * chunk; j < end; ++j) {
        if (in_tree[j]) continue;
        const int d = std::max({ccore, core_sq[j], corpus::hamming(cv, points[j])});
        if (d < best[j]) {
          best[j] = d;
          best_from[j] = static_cast<int>(current);
        }
        if (best[j] < local.first) local = {best[j], static_cast<int>(j)};
      }
      shard_best[s] = local;
    });
    std::pair<int, int> chosen{std::numeric_limits<int>::max(), -1};
    for (const auto& sb : shard_best)
      if (sb.second >= 0 && (sb.first < chosen.first || (sb.first == chosen.first && sb.second < chosen.second)))
        chosen = sb;
    const auto next = static_cast<std::size_t>(chosen.second);
    in_tree[next] = 1;
    edges.push_back({best_from[next], static_cast<int>(next), best[next]});
    current = next;
  }
  return edges;
}

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  int unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return a;
  }

 private:
  std::vector<int> parent_;
};

// Single-linkage hierarchy with all edges of equal (effective) length merged
// in one step, so a level can join more than two components.
struct LevelNode {
  double distance = 0.0;
  std::vector<int> children;
  std::size_t size = 0;
  std::uint32_t key = 0;  // smallest vector bits below the node
};

struct LevelTree {
  std::vector<LevelNode> nodes;  // [0, m) are the points
  int root = 0;
};

LevelTree build_levels(const WeightedPoints& pts, const std::vector<int>& core_sq, std::vector<Edge> edges,
                       double floor) {
  const std::size_t m = pts.vectors.size();
  LevelTree tree;
  tree.nodes.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    tree.nodes[i].distance = effective_distance(core_sq[i], floor);
    tree.nodes[i].size = pts.weights[i];
    tree.nodes[i].key = pts.vectors[i].bits();
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    const auto kx = std::make_tuple(x.mrd_sq, std::min(x.a, x.b), std::max(x.a, x.b));
    const auto ky = std::make_tuple(y.mrd_sq, std::min(y.a, y.b), std::max(y.a, y.b));
    return kx < ky;
  });

  DisjointSet sets(m);
  std::vector<int> node_of(m);
  std::iota(node_of.begin(), node_of.end(), 0);
  std::size_t i = 0;
  while (i < edges.size()) {
    const double level = effective_distance(edges[i].mrd_sq, floor);
    std::size_t j = i;
    while (j < edges.size() && effective_distance(edges[j].mrd_sq, floor) == level) ++j;

    std::unordered_map<int, std::vector<int>> merged;  // set root -> pre-level nodes
    auto members = [&](int root) -> std::vector<int> {
      auto it = merged.find(root);
      if (it == merged.end()) return {node_of[root]};
      std::vector<int> out = std::move(it->second);
      merged.erase(it);
      return out;
    };
    for (std::size_t e = i; e < j; ++e) {
      const int ra = sets.find(edges[e].a);
      const int rb = sets.find(edges[e].b);
      if (ra == rb) continue;
      auto left = members(ra);
      auto right = members(rb);
      left.insert(left.end(), right.begin(), right.end());
      merged[sets.unite(ra, rb)] = std::move(left);
    }
    std::vector<int> roots;
    for (const auto& [root, unused] : merged) roots.push_back(root);
    std::sort(roots.begin(), roots.end());
    for (int root : roots) {
      LevelNode node;
      node.distance = level;
      node.children = std::move(merged[root]);
      node.key = std::numeric_limits<std::uint32_t>::max();
      for (int c : node.children) {
        node.size += tree.nodes[c].size;
        node.key = std::min(node.key, tree.nodes[c].key);
      }
      std::sort(node.children.begin(), node.children.end(),
                [&](int x, int y) { return tree.nodes[x].key < tree.nodes[y].key; });
      node_of[root] = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(std::move(node));
    }
    i = j;
  }
  tree.root = node_of[sets.find(0)];
  return tree;
}

struct Condensed {
  std::vector<CondensedRow> rows;
  int root = 0;
  int cluster_end = 0;              // one past the largest cluster id
  std::vector<int> cluster_parent;  // indexed by id - root
  std::vector<double> birth;        // indexed by id - root
  std::vector<int> point_row;       // point -> row index
};

// At a split, small components joined by the same level attach to a large
// one they touch (through other small ones if needed), as if their merges
// came first among the equal-length edges. Nearest by hops wins, then the
// larger component, then the smaller key. Unreached pieces get -1.
std::vector<int> attach_small(const LevelTree& levels, const LevelNode& node, const std::vector<char>& is_big,
                              const WeightedPoints& pts, const std::vector<int>& core_sq, double floor) {
  const int m = static_cast<int>(pts.vectors.size());
  const std::size_t k = node.children.size();
  std::vector<std::vector<int>> leaves(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<int> stack{node.children[c]};
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      if (n < m) leaves[c].push_back(n);
      else stack.insert(stack.end(), levels.nodes[n].children.begin(), levels.nodes[n].children.end());
    }
  }
  auto touches = [&](std::size_t a, std::size_t b) {
    for (int p : leaves[a])
      for (int q : leaves[b]) {
        const int d = std::max({core_sq[p], core_sq[q], corpus::hamming(pts.vectors[p], pts.vectors[q])});
        if (effective_distance(d, floor) <= node.distance) return true;
      }
    return false;
  };

  std::vector<int> owner(k, -1);
  std::vector<std::size_t> frontier;
  for (std::size_t c = 0; c < k; ++c)
    if (is_big[c]) {
      owner[c] = static_cast<int>(c);
      frontier.push_back(c);
    }
  auto better = [&](int a, int b) {
    const auto& na = levels.nodes[node.children[a]];
    const auto& nb = levels.nodes[node.children[b]];
    if (na.size != nb.size) return na.size > nb.size;
    return na.key < nb.key;
  };
  while (!frontier.empty()) {
    std::vector<std::size_t> next;
    std::vector<int> claimed(k, -1);
    for (std::size_t s = 0; s < k; ++s) {
      if (owner[s] >= 0) continue;
      for (std::size_t f : frontier)
        if ((claimed[s] < 0 || better(owner[f], claimed[s])) && touches(s, f)) claimed[s] = owner[f];
      if (claimed[s] >= 0) next.push_back(s);
    }
    for (std::size_t s : next) owner[s] = claimed[s];
    frontier = std::move(next);
  }
  return owner;
}

Condensed condense(const LevelTree& levels, const WeightedPoints& pts, const std::vector<int>& core_sq,
                   std::size_t min_cluster_size, double floor) {
  const int m = static_cast<int>(pts.vectors.size());
  Condensed out;
  out.root = m;
  out.cluster_end = m + 1;
  out.cluster_parent.push_back(-1);
  out.birth.push_back(0.0);
  out.point_row.assign(pts.vectors.size(), -1);

  auto emit_point = [&](int cluster, int point, double lambda) {
    out.point_row[point] = static_cast<int>(out.rows.size());
    out.rows.push_back({cluster, point, lambda, levels.nodes[point].size});
  };
  auto fall_out = [&](int node, int cluster, double lambda) {
    std::vector<int> stack{node};
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      if (n < m) {
        emit_point(cluster, n, lambda);
        continue;
      }
      const auto& kids = levels.nodes[n].children;
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
  };

  std::deque<std::pair<int, int>> queue{{levels.root, out.root}};
  while (!queue.empty()) {
    const auto [node, cluster] = queue.front();
    queue.pop_front();
    const LevelNode& ln = levels.nodes[node];
    const double lambda = 1.0 / ln.distance;
    if (node < m) {
      // A continuing cluster reduced to one weighted point: its copies
      // separate at the point's own core distance.
      emit_point(cluster, node, lambda);
      continue;
    }
    // A point whose copies separate no later than this merge does not enter
    // it as one component: its copies are singletons here.
    auto component_size = [&](int c) {
      return c < m && levels.nodes[c].distance >= ln.distance ? std::size_t{1} : levels.nodes[c].size;
    };
    std::vector<int> big;
    for (int c : ln.children)
      if (component_size(c) >= min_cluster_size) big.push_back(c);
    if (big.size() >= 2) {
      std::vector<char> is_big(ln.children.size(), 0);
      for (std::size_t c = 0; c < ln.children.size(); ++c)
        is_big[c] = component_size(ln.children[c]) >= min_cluster_size;
      const std::vector<int> owner = attach_small(levels, ln, is_big, pts, core_sq, floor);
      std::vector<int> id_of(ln.children.size(), -1);
      for (std::size_t c = 0; c < ln.children.size(); ++c) {
        if (!is_big[c]) continue;
        std::size_t size = 0;
        for (std::size_t s = 0; s < ln.children.size(); ++s)
          if (owner[s] == static_cast<int>(c)) size += levels.nodes[ln.children[s]].size;
        id_of[c] = out.cluster_end++;
        out.cluster_parent.push_back(cluster);
        out.birth.push_back(lambda);
        out.rows.push_back({cluster, id_of[c], lambda, size});
      }
      for (std::size_t c = 0; c < ln.children.size(); ++c) {
        if (is_big[c]) queue.emplace_back(ln.children[c], id_of[c]);
        else fall_out(ln.children[c], owner[c] >= 0 ? id_of[owner[c]] : cluster, lambda);
      }
    } else if (big.size() == 1) {
      for (int c : ln.children)
        if (c != big.front()) fall_out(c, cluster, lambda);
      queue.emplace_back(big.front(), cluster);
    } else {
      for (int c : ln.children) fall_out(c, cluster, lambda);
    }
  }
  return out;
}

std::vector<std::size_t> choose_subsample(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (k >= n) return idx;
  Rng rng(derive_seed(seed, "cluster/subsample"));
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

void ClusterParams::validate() const {
  if (min_cluster_size < 2) throw UsageError("min_cluster_size must be >= 2");
  if (min_samples < 1) throw UsageError("min_samples must be >= 1");
  if (min_samples > min_cluster_size) throw UsageError("min_samples must not exceed min_cluster_size");
  if (subsample_size < static_cast<std::size_t>(min_cluster_size))
    throw UsageError("subsample_size must be >= min_cluster_size");
  if (!(distance_floor > 0.0)) throw UsageError("distance_floor must be positive");
}

double ClusterModel::core_distance(std::size_t point) const {
  return std::sqrt(static_cast<double>(core_sq.at(point)));
}

std::vector<int> ClusterModel::fitted_labels() const {
  std::vector<int> out;
  out.reserve(fitted_point.size());
  for (int p : fitted_point) out.push_back(point_labels[p]);
  return out;
}

std::size_t ClusterModel::noise_weight() const {
  std::size_t total = 0;
  for (std::size_t p = 0; p < points.size(); ++p)
    if (point_labels[p] == kNoise) total += weights[p];
  return total;
}

std::size_t ClusterAssignment::noise_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

int ClusterAssignment::cluster_count() const {
  int top = kNoise;
  for (int l : labels) top = std::max(top, l);
  return top + 1;
}

ClusterModel fit(std::span<const FeatureVector> vectors, const ClusterParams& params) {
  params.validate();
  if (vectors.size() < static_cast<std::size_t>(params.min_cluster_size))
    throw DataError("corpus has " + std::to_string(vectors.size()) + " rows, fewer than min_cluster_size " +
                    std::to_string(params.min_cluster_size));

  ClusterModel model;
  model.params = params;
  model.corpus_size = vectors.size();
  model.fitted_indices = choose_subsample(vectors.size(), params.subsample_size, params.seed);
  std::vector<FeatureVector> sample;
  sample.reserve(model.fitted_indices.size());
  for (std::size_t i : model.fitted_indices) sample.push_back(vectors[i]);

  WeightedPoints pts = collapse_points(sample, params.collapse_duplicates);
  const std::size_t m = pts.vectors.size();
  const std::size_t needed = std::min<std::size_t>(params.min_samples, sample.size());

  std::vector<int> core_sq(m);
  parallel_for(m, params.workers, [&](std::size_t i) {
    core_sq[i] = radius_holding(pts.vectors[i], pts.vectors, pts.weights, needed);
  });

  LevelTree levels = build_levels(pts, core_sq, minimum_spanning_tree(pts.vectors, core_sq, params.workers),
                                  params.distance_floor);
  Condensed condensed =
      condense(levels, pts, core_sq, static_cast<std::size_t>(params.min_cluster_size), params.distance_floor);

  // Excess-of-mass stability.
  const int root = condensed.root;
  const int cluster_total = condensed.cluster_end - root;
  std::vector<double> stability(cluster_total, 0.0);
  std::vector<std::vector<int>> child_clusters(cluster_total);
  for (const auto& row : condensed.rows) {
    stability[row.parent - root] += (row.lambda - condensed.birth[row.parent - root]) * static_cast<double>(row.child_size);
    if (row.child >= root) child_clusters[row.parent - root].push_back(row.child);
  }
  std::vector<char> selected(cluster_total, 0);
  std::vector<double> propagated(cluster_total, 0.0);
  for (int id = condensed.cluster_end - 1; id > root; --id) {
    const int k = id - root;
    double children_sum = 0.0;
    for (int c : child_clusters[k]) children_sum += propagated[c - root];
    if (child_clusters[k].empty() || children_sum <= stability[k]) {
      selected[k] = 1;
      propagated[k] = stability[k];
      std::vector<int> stack(child_clusters[k].begin(), child_clusters[k].end());
      while (!stack.empty()) {
        const int d = stack.back();
        stack.pop_back();
        selected[d - root] = 0;
        for (int c : child_clusters[d - root]) stack.push_back(c);
      }
    } else {
      propagated[k] = children_sum;
    }
  }
  const bool root_selected = cluster_total == 1;
  if (root_selected) selected[0] = 1;
  double root_max_lambda = 0.0;
  for (const auto& row : condensed.rows)
    if (row.parent == root) root_max_lambda = std::max(root_max_lambda, row.lambda);

  // Label points by their selected ancestor.
  std::vector<int> node_of_point(m, -1);
  std::vector<double> lambda_of_point(m, 0.0);
  for (std::size_t p = 0; p < m; ++p) {
    const CondensedRow& row = condensed.rows[condensed.point_row[p]];
    lambda_of_point[p] = row.lambda;
    int c = row.parent;
    while (c != root && !selected[c - root]) c = condensed.cluster_parent[c - root];
    if (c != root || (root_selected && row.lambda >= root_max_lambda)) node_of_point[p] = c;
  }

  // Public labels ordered by the smallest member vector.
  std::map<int, std::uint32_t> node_key;
  for (std::size_t p = 0; p < m; ++p) {
    if (node_of_point[p] < 0) continue;
    auto [it, inserted] = node_key.try_emplace(node_of_point[p], pts.vectors[p].bits());
    if (!inserted) it->second = std::min(it->second, pts.vectors[p].bits());
  }
  std::vector<std::pair<std::uint32_t, int>> order;
  for (const auto& [node, key] : node_key) order.emplace_back(key, node);
  std::sort(order.begin(), order.end());
  std::map<int, int> label_of_node;
  for (std::size_t l = 0; l < order.size(); ++l) {
    label_of_node[order[l].second] = static_cast<int>(l);
    SelectedCluster sc;
    sc.label = static_cast<int>(l);
    sc.node = order[l].second;
    sc.lambda_birth = condensed.birth[sc.node - root];
    model.clusters.push_back(sc);
  }

  model.point_labels.assign(m, kNoise);
  model.point_strengths.assign(m, 0.0);
  for (std::size_t p = 0; p < m; ++p) {
    if (node_of_point[p] < 0) continue;
    auto& sc = model.clusters[label_of_node[node_of_point[p]]];
    model.point_labels[p] = sc.label;
    sc.lambda_death = std::max(sc.lambda_death, lambda_of_point[p]);
    sc.size += pts.weights[p];
  }
  for (std::size_t p = 0; p < m; ++p) {
    const int label = model.point_labels[p];
    if (label == kNoise) continue;
    auto& sc = model.clusters[label];
    model.point_strengths[p] = std::min(lambda_of_point[p], sc.lambda_death) / sc.lambda_death;
    if (lambda_of_point[p] == sc.lambda_death) sc.exemplars.push_back(pts.vectors[p]);
  }
  for (auto& sc : model.clusters) {
    std::sort(sc.exemplars.begin(), sc.exemplars.end());
    sc.exemplars.erase(std::unique(sc.exemplars.begin(), sc.exemplars.end()), sc.exemplars.end());
  }

  model.fitted_point = std::move(pts.point_of_row);
  model.points = std::move(pts.vectors);
  model.weights = std::move(pts.weights);
  model.core_sq = std::move(core_sq);
  model.tree = std::move(condensed.rows);
  model.root_node = root;
  model.point_lambdas = std::move(lambda_of_point);
  return model;
}

ClusterAssignment approximate_predict(const ClusterModel& model, std::span<const FeatureVector> vectors) {
  if (model.points.empty()) throw UsageError("approximate_predict: model is not fitted");
  std::unordered_map<std::uint32_t, int> known;
  for (std::size_t p = 0; p < model.points.size(); ++p) known.try_emplace(model.points[p].bits(), static_cast<int>(p));

  std::size_t fitted_total = 0;
  for (std::size_t w : model.weights) fitted_total += w;
  // The query counts as one of its own neighbors.
  const std::size_t needed =
      std::min<std::size_t>(fitted_total, static_cast<std::size_t>(std::max(0, model.params.min_samples - 1)));
  const double floor = model.params.distance_floor;

  ClusterAssignment out;
  out.labels.assign(vectors.size(), kNoise);
  out.strengths.assign(vectors.size(), 0.0);
  parallel_for(vectors.size(), model.params.workers, [&](std::size_t i) {
    const FeatureVector q = vectors[i];
    if (auto it = known.find(q.bits()); it != known.end()) {
      out.labels[i] = model.point_labels[it->second];
      out.strengths[i] = model.point_strengths[it->second];
      return;
    }
    const int core_q = radius_holding(q, model.points, model.weights, needed);
    int best = std::numeric_limits<int>::max();
    int nearest = -1;
    for (std::size_t p = 0; p < model.points.size(); ++p) {
      const int d = std::max({core_q, model.core_sq[p], corpus::hamming(q, model.points[p])});
      if (d < best) {
        best = d;
        nearest = static_cast<int>(p);
      }
    }
    const int label = model.point_labels[nearest];
    if (label == kNoise) return;
    const SelectedCluster& sc = model.clusters[label];
    const double distance = effective_distance(best, floor);
    const double radius = 1.0 / sc.lambda_death;
    if (distance > radius * (1.0 + 1e-12)) return;
    out.labels[i] = label;
    out.strengths[i] = std::min({1.0 / distance, model.point_lambdas[nearest], sc.lambda_death}) / sc.lambda_death;
  });
  return out;
}

ClusterAssignment fit_predict(std::span<const FeatureVector> vectors, const ClusterParams& params,
                              ClusterModel* model_out) {
  ClusterModel model = fit(vectors, params);
  ClusterAssignment assignment = approximate_predict(model, vectors);
  if (model_out) *model_out = std::move(model);
  return assignment;
}

StabilityReport subsample_stability(std::span<const FeatureVector> vectors, const ClusterParams& params,
                                    std::span<const std::uint64_t> seeds, std::size_t evaluation_size) {
  if (seeds.size() < 2) throw UsageError("subsample_stability needs at least two repeats");
  StabilityReport report;
  report.seeds.assign(seeds.begin(), seeds.end());

  std::vector<std::size_t> eval_rows(vectors.size());
  std::iota(eval_rows.begin(), eval_rows.end(), 0);
  if (eval_rows.size() > evaluation_size) {
    Rng rng(derive_seed(params.seed, "cluster/stability/evaluation"));
    for (std::size_t i = 0; i < evaluation_size; ++i)
      std::swap(eval_rows[i], eval_rows[i + rng.below(eval_rows.size() - i)]);
    eval_rows.resize(evaluation_size);
    std::sort(eval_rows.begin(), eval_rows.end());
  }
  std::vector<FeatureVector> eval;
  for (std::size_t r : eval_rows) eval.push_back(vectors[r]);
  report.evaluation_size = eval.size();

  std::vector<std::vector<int>> predictions;
  for (std::uint64_t seed : seeds) {
    ClusterParams p = params;
    p.seed = seed;
    const ClusterModel model = fit(vectors, p);
    auto assignment = approximate_predict(model, eval);
    report.cluster_counts.push_back(static_cast<int>(model.clusters.size()));
    report.noise_fractions.push_back(static_cast<double>(assignment.noise_count()) /
                                     static_cast<double>(std::max<std::size_t>(1, eval.size())));
    predictions.push_back(std::move(assignment.labels));
  }
  const std::size_t k = predictions.size();
  report.ari.assign(k, std::vector<double>(k, 1.0));
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      const double ari = stats::adjusted_rand_index(predictions[a], predictions[b]);
      report.ari[a][b] = report.ari[b][a] = ari;
      sum += ari;
      ++pairs;
    }
  report.mean_ari = sum / static_cast<double>(pairs);
  return report;
}

StabilityReport subsample_stability(std::span<const FeatureVector> vectors, const ClusterParams& params,
                                    int repeats, std::size_t evaluation_size) {
  if (repeats < 2) throw UsageError("subsample_stability needs at least two repeats");
  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < repeats; ++r)
    seeds.push_back(derive_seed(params.seed, "cluster/stability/repeat/" + std::to_string(r)));
  return subsample_stability(vectors, params, seeds, evaluation_size);
}

}  // namespace safecomb::cluster
