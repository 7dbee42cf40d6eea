#pragma once

#include "viodet/geometry.hpp"
#include "viodet/scale.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

namespace viodet {

/// A single detection lifted to 3D.
struct ObjectPoint {
  Vec3 loc = Vec3::Zero();  // world, meters
  int label = -1;
  Vec3 view = Vec3::Zero();  // unit direction camera -> loc
  int scale = 0;             // distance bucket
  double prob = 0.0;         // detector probability for `label`
};

/// Persistent map node accumulating per-label scores plus the view
/// directions and distance buckets it has been observed under. Views stay
/// pairwise >= the view gate apart, buckets pairwise >= 1 apart.
struct SuperPoint {
  int id = -1;
  Vec3 loc = Vec3::Zero();
  std::map<int, double> scores;  // label -> accumulated score, sorted by label
  std::vector<Vec3> views;
  std::vector<int> scales;
};

/// Which lists the novelty gates for view/scale appends are checked against.
enum class AppendGate {
  PerSuperpoint,  // each superpoint's own lists
  Pooled          // the minimum over the whole fused set
};

struct MapConfig {
  double k_s = 0.2;            // scale-difference normalizer
  double s_diff_cap = 5.0;     // must equal 1 / k_s
  double view_gate_deg = 45.0;
  double view_cap_deg = 90.0;
  double reward = 1.0;  // bonus for re-observations within the create radius
  AppendGate append_gate = AppendGate::PerSuperpoint;

  void validate() const;
};

struct FusionWeights {
  double view_diff_deg = 180.0;  // min angle to any stored view in the fused set
  double scale_diff = 0.0;       // min |bucket difference| in the fused set
  double w_view = 1.0;
  double w_scale = 1.0;
  double score_in = 0.0;  // (w_view + w_scale) / 2 * prob
};

struct FuseOutcome {
  std::vector<int> fused_ids;
  std::optional<int> created_id;
  FusionWeights weights;
};

/// Online semantic map. Superpoints are immutable in location, scores only
/// grow, and all queries are backed by a uniform hash grid whose cell size
/// should be the largest fuse radius in the scale database. Single writer;
/// fuse/map_probability must run in frame order.
class SemanticMap {
 public:
  explicit SemanticMap(MapConfig cfg = MapConfig{}, double cell_size = 2.0);
  SemanticMap(MapConfig cfg, double cell_size, std::vector<SuperPoint> superpoints);

  /// Ids of all superpoints with ||loc - center|| <= radius (inclusive),
  /// ascending.
  std::vector<int> query_radius(const Vec3& center, double radius) const;

  /// Pooled novelty weights of `op` against the fused set. An empty set
  /// means a maximally novel observation: both weights are 1.
  FusionWeights compute_weights(const ObjectPoint& op, const std::vector<int>& fused_ids) const;

  /// One Algorithm-1 fusion step: scores every superpoint within the
  /// category's fuse radius, appends novel views/buckets per the append
  /// gates, and creates a new superpoint when none existed within the create
  /// radius before the call.
  FuseOutcome fuse(const ObjectPoint& op, const ScaleDatabase& db);

  /// Map factor for `op` from the superpoints within the category's create
  /// radius; in [0.5, 1). Call after fuse for the same object point.
  double map_probability(const ObjectPoint& op, const ScaleDatabase& db) const;

  const std::vector<SuperPoint>& superpoints() const { return superpoints_; }
  const SuperPoint& superpoint(int id) const { return superpoints_.at(id); }
  std::size_t size() const { return superpoints_.size(); }
  bool empty() const { return superpoints_.empty(); }
  const MapConfig& config() const { return cfg_; }
  double cell_size() const { return cell_size_; }

 private:
  struct CellKey {
    std::int64_t x = 0, y = 0, z = 0;
    bool operator==(const CellKey&) const = default;
  };
  struct CellHash {
    std::size_t operator()(const CellKey& k) const;
  };

  CellKey cell_of(const Vec3& p) const;
  int insert_superpoint(const ObjectPoint& op, double initial_score);

  MapConfig cfg_;
  double cell_size_;
  std::vector<SuperPoint> superpoints_;
  std::unordered_map<CellKey, std::vector<int>, CellHash> grid_;
};

}  // namespace viodet
