#include "viodet/semantic_map.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace viodet {

void MapConfig::validate() const {
  if (!(k_s > 0.0)) {
    throw std::invalid_argument("MapConfig: k_s must be positive");
  }
  if (std::abs(1.0 / k_s - s_diff_cap) > 1e-9) {
    throw std::invalid_argument("MapConfig: s_diff_cap must equal 1/k_s");
  }
  if (!(view_gate_deg > 0.0) || !(view_cap_deg > view_gate_deg)) {
    throw std::invalid_argument("MapConfig: require 0 < view_gate_deg < view_cap_deg");
  }
}

std::size_t SemanticMap::CellHash::operator()(const CellKey& k) const {
  std::uint64_t h = 1469598103934665603ull;
  for (const std::int64_t v : {k.x, k.y, k.z}) {
    h ^= static_cast<std::uint64_t>(v);
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

SemanticMap::SemanticMap(MapConfig cfg, double cell_size) : cfg_(cfg), cell_size_(cell_size) {
  cfg_.validate();
  if (!(cell_size_ > 0.0)) {
    throw std::invalid_argument("SemanticMap: cell size must be positive");
  }
}

SemanticMap::SemanticMap(MapConfig cfg, double cell_size, std::vector<SuperPoint> superpoints)
    : SemanticMap(cfg, cell_size) {
  superpoints_ = std::move(superpoints);
  for (std::size_t i = 0; i < superpoints_.size(); ++i) {
    if (superpoints_[i].id != static_cast<int>(i)) {
      throw std::invalid_argument("SemanticMap: superpoint ids must be dense and ordered");
    }
    grid_[cell_of(superpoints_[i].loc)].push_back(static_cast<int>(i));
  }
}

SemanticMap::CellKey SemanticMap::cell_of(const Vec3& p) const {
  const auto cell = [this](double v) {
    return static_cast<std::int64_t>(std::floor(v / cell_size_));
  };
  return CellKey{cell(p.x()), cell(p.y()), cell(p.z())};
}

std::vector<int> SemanticMap::query_radius(const Vec3& center, double radius) const {
  std::vector<int> ids;
  if (grid_.empty()) {
    return ids;
  }
  const CellKey lo = cell_of(center - Vec3::Constant(radius));
  const CellKey hi = cell_of(center + Vec3::Constant(radius));
  const double r2 = radius * radius;
  for (std::int64_t x = lo.x; x <= hi.x; ++x) {
    for (std::int64_t y = lo.y; y <= hi.y; ++y) {
      for (std::int64_t z = lo.z; z <= hi.z; ++z) {
        const auto it = grid_.find(CellKey{x, y, z});
        if (it == grid_.end()) {
          continue;
        }
        for (const int id : it->second) {
          if ((superpoints_[id].loc - center).squaredNorm() <= r2) {
            ids.push_back(id);
          }
        }
      }
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

FusionWeights SemanticMap::compute_weights(const ObjectPoint& op,
                                           const std::vector<int>& fused_ids) const {
  FusionWeights w;
  if (fused_ids.empty()) {
    // A first observation is maximally novel: full view and scale weight.
    w.view_diff_deg = 180.0;
    w.scale_diff = cfg_.s_diff_cap;
  } else {
    double view_diff = std::numeric_limits<double>::infinity();
    double scale_diff = std::numeric_limits<double>::infinity();
    for (const int id : fused_ids) {
      const SuperPoint& sp = superpoints_[id];
      for (const Vec3& view : sp.views) {
        view_diff = std::min(view_diff, angular_difference_deg(op.view, view));
      }
      for (const int s : sp.scales) {
        scale_diff = std::min(scale_diff, static_cast<double>(std::abs(op.scale - s)));
      }
    }
    w.view_diff_deg = view_diff;
    w.scale_diff = scale_diff;
  }

  if (w.view_diff_deg < cfg_.view_gate_deg) {
    w.w_view = 0.0;
  } else if (w.view_diff_deg <= cfg_.view_cap_deg) {
    w.w_view = (w.view_diff_deg - cfg_.view_gate_deg) / (cfg_.view_cap_deg - cfg_.view_gate_deg);
  } else {
    w.w_view = 1.0;
  }
  w.w_scale = std::min(cfg_.k_s * w.scale_diff, 1.0);
  w.score_in = 0.5 * (w.w_view + w.w_scale) * op.prob;
  return w;
}

int SemanticMap::insert_superpoint(const ObjectPoint& op, double initial_score) {
  SuperPoint sp;
  sp.id = static_cast<int>(superpoints_.size());
  sp.loc = op.loc;
  sp.scores[op.label] = initial_score;
  sp.views.push_back(op.view);
  sp.scales.push_back(op.scale);
  superpoints_.push_back(std::move(sp));
  grid_[cell_of(op.loc)].push_back(superpoints_.back().id);
  return superpoints_.back().id;
}

FuseOutcome SemanticMap::fuse(const ObjectPoint& op, const ScaleDatabase& db) {
  const double fuse_r = db.fuse_radius(op.label);
  const double create_r = db.create_radius(op.label);

  FuseOutcome outcome;
  outcome.fused_ids = query_radius(op.loc, fuse_r);
  outcome.weights = compute_weights(op, outcome.fused_ids);
  const double score_in = outcome.weights.score_in;

  // Creation is judged against the map state before this call's fusions.
  bool had_core_superpoint = false;
  for (const int id : outcome.fused_ids) {
    if ((superpoints_[id].loc - op.loc).norm() <= create_r) {
      had_core_superpoint = true;
      break;
    }
  }

  for (const int id : outcome.fused_ids) {
    SuperPoint& sp = superpoints_[id];
    const double dist = (sp.loc - op.loc).norm();
    assert(dist <= fuse_r + 1e-12);
    double& score = sp.scores[op.label];  // initializes missing entries to 0
    score += dist <= create_r ? score_in + cfg_.reward : score_in;

    double view_gate_diff = outcome.weights.view_diff_deg;
    double scale_gate_diff = outcome.weights.scale_diff;
    if (cfg_.append_gate == AppendGate::PerSuperpoint) {
      view_gate_diff = std::numeric_limits<double>::infinity();
      for (const Vec3& view : sp.views) {
        view_gate_diff = std::min(view_gate_diff, angular_difference_deg(op.view, view));
      }
      scale_gate_diff = std::numeric_limits<double>::infinity();
      for (const int s : sp.scales) {
        scale_gate_diff = std::min(scale_gate_diff, static_cast<double>(std::abs(op.scale - s)));
      }
    }
    if (view_gate_diff >= cfg_.view_gate_deg) {
      sp.views.push_back(op.view);
    }
    if (scale_gate_diff >= 1.0) {
      sp.scales.push_back(op.scale);
    }
  }

  if (!had_core_superpoint) {
    outcome.created_id = insert_superpoint(op, score_in);
  }
  return outcome;
}

double SemanticMap::map_probability(const ObjectPoint& op, const ScaleDatabase& db) const {
  const std::vector<int> near = query_radius(op.loc, db.create_radius(op.label));
  double own_max = 0.0;
  double other_max = 0.0;
  for (const int id : near) {
    for (const auto& [label, score] : superpoints_[id].scores) {
      if (label == op.label) {
        own_max = std::max(own_max, score);
      } else {
        other_max = std::max(other_max, score);
      }
    }
  }
  if (own_max < other_max) {
    return 0.5;
  }
  // other_max - own_max <= 0, so the exponential cannot overflow.
  return 1.0 / (1.0 + std::exp(other_max - own_max));
}

}  // namespace viodet
