#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pgap/common.hpp"

namespace pgap {

struct Bin {
  std::size_t id = 0;
  std::vector<double> capacity;  // one entry per dimension
};

struct ItemType {
  std::size_t id = 0;
  double rate = 0.0;  // Poisson arrivals per unit time
};

enum class EdgeClass : std::uint8_t { Light, Heavy };

/// An offline GAP instance: bins with D-dimensional capacities, item types
/// with Poisson rates, and per-(bin, type) rewards and demand vectors.
///
/// Incompatible pairs are encoded as weight 0. Instances are immutable once
/// constructed and may be shared freely between threads.
class GapInstance {
 public:
  GapInstance() = default;

  /// `weights` is bins x types; `demands` is bins x types x dim.
  GapInstance(std::vector<std::vector<double>> capacities,
              std::vector<double> rates,
              std::vector<std::vector<double>> weights,
              std::vector<std::vector<std::vector<double>>> demands)
      : dim_(capacities.empty() ? 0 : capacities.front().size()) {
    const std::size_t m = capacities.size();
    const std::size_t n = rates.size();
    if (m == 0 || n == 0) throw std::invalid_argument("instance needs at least one bin and one type");
    if (dim_ == 0) throw std::invalid_argument("dimension must be at least 1");
    if (weights.size() != m || demands.size() != m)
      throw std::invalid_argument("weights/demands must have one row per bin");

    bins_.reserve(m);
    for (std::size_t u = 0; u < m; ++u) {
      if (capacities[u].size() != dim_) throw std::invalid_argument("capacity length differs from dim");
      for (double c : capacities[u]) check_nonneg(c, "capacity");
      bins_.push_back(Bin{u, std::move(capacities[u])});
    }
    types_.reserve(n);
    for (std::size_t v = 0; v < n; ++v) {
      if (!std::isfinite(rates[v]) || !(rates[v] > 0.0)) throw std::invalid_argument("rates must be finite and > 0");
      types_.push_back(ItemType{v, rates[v]});
    }
    weights_.resize(m * n);
    demands_.resize(m * n * dim_);
    for (std::size_t u = 0; u < m; ++u) {
      if (weights[u].size() != n || demands[u].size() != n)
        throw std::invalid_argument("weights/demands must have one column per type");
      for (std::size_t v = 0; v < n; ++v) {
        check_nonneg(weights[u][v], "weight");
        weights_[u * n + v] = weights[u][v];
        if (demands[u][v].size() != dim_) throw std::invalid_argument("demand length differs from dim");
        for (std::size_t d = 0; d < dim_; ++d) {
          check_nonneg(demands[u][v][d], "demand");
          demands_[(u * n + v) * dim_ + d] = demands[u][v][d];
        }
      }
    }
  }

  std::size_t num_bins() const { return bins_.size(); }
  std::size_t num_types() const { return types_.size(); }
  std::size_t dim() const { return dim_; }

  const std::vector<Bin>& bins() const { return bins_; }
  const std::vector<ItemType>& item_types() const { return types_; }

  double weight(std::size_t u, std::size_t v) const { return weights_[u * num_types() + v]; }
  double rate(std::size_t v) const { return types_[v].rate; }
  double capacity(std::size_t u, std::size_t d) const { return bins_[u].capacity[d]; }

  std::span<const double> demand(std::size_t u, std::size_t v) const {
    return {demands_.data() + (u * num_types() + v) * dim_, dim_};
  }
  std::span<const double> capacity(std::size_t u) const { return bins_[u].capacity; }

  std::vector<double> rates() const {
    std::vector<double> out;
    out.reserve(types_.size());
    for (const auto& t : types_) out.push_back(t.rate);
    return out;
  }

  std::vector<std::vector<double>> weight_matrix() const {
    std::vector<std::vector<double>> w(num_bins(), std::vector<double>(num_types()));
    for (std::size_t u = 0; u < num_bins(); ++u)
      for (std::size_t v = 0; v < num_types(); ++v) w[u][v] = weight(u, v);
    return w;
  }

  std::vector<std::vector<double>> capacity_matrix() const {
    std::vector<std::vector<double>> c;
    c.reserve(bins_.size());
    for (const auto& b : bins_) c.push_back(b.capacity);
    return c;
  }

  std::vector<std::vector<std::vector<double>>> demand_tensor() const {
    std::vector<std::vector<std::vector<double>>> r(num_bins(), std::vector<std::vector<double>>(num_types()));
    for (std::size_t u = 0; u < num_bins(); ++u)
      for (std::size_t v = 0; v < num_types(); ++v) {
        auto s = demand(u, v);
        r[u][v].assign(s.begin(), s.end());
      }
    return r;
  }

  /// D = 1 with every capacity and every demand equal to one.
  bool is_matching() const {
    if (dim_ != 1) return false;
    for (const auto& b : bins_)
      if (b.capacity[0] != 1.0) return false;
    for (double r : demands_)
      if (r != 1.0) return false;
    return true;
  }

  /// Does `residual` accommodate the demand of type v in bin u in every dimension?
  bool fits(std::span<const double> residual, std::size_t u, std::size_t v) const {
    auto r = demand(u, v);
    for (std::size_t d = 0; d < dim_; ++d)
      if (r[d] > residual[d] + kTol) return false;
    return true;
  }

 private:
  static void check_nonneg(double x, const char* what) {
    if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
  }

  std::size_t dim_ = 0;
  std::vector<Bin> bins_;
  std::vector<ItemType> types_;
  std::vector<double> weights_;
  std::vector<double> demands_;
};

/// Light iff r[d] <= C[d] / 2 in every dimension (equality counts as light).
inline EdgeClass classify_edge(std::span<const double> capacity, std::span<const double> demand) {
  for (std::size_t d = 0; d < capacity.size(); ++d)
    if (demand[d] > 0.5 * capacity[d]) return EdgeClass::Heavy;
  return EdgeClass::Light;
}

/// bins x types matrix of edge classes.
inline std::vector<std::vector<EdgeClass>> classify_edges(const GapInstance& inst) {
  std::vector<std::vector<EdgeClass>> out(inst.num_bins(), std::vector<EdgeClass>(inst.num_types()));
  for (std::size_t u = 0; u < inst.num_bins(); ++u)
    for (std::size_t v = 0; v < inst.num_types(); ++v)
      out[u][v] = classify_edge(inst.capacity(u), inst.demand(u, v));
  return out;
}

inline std::vector<std::vector<bool>> edge_mask(const std::vector<std::vector<EdgeClass>>& classes, EdgeClass which) {
  std::vector<std::vector<bool>> mask(classes.size());
  for (std::size_t u = 0; u < classes.size(); ++u) {
    mask[u].resize(classes[u].size());
    for (std::size_t v = 0; v < classes[u].size(); ++v) mask[u][v] = classes[u][v] == which;
  }
  return mask;
}

/// Unit-capacity, unit-demand, D = 1 instance with the given rewards and rates.
inline GapInstance make_matching_instance(std::vector<std::vector<double>> weights, std::vector<double> rates) {
  const std::size_t m = weights.size();
  const std::size_t n = rates.size();
  std::vector<std::vector<double>> caps(m, std::vector<double>{1.0});
  std::vector<std::vector<std::vector<double>>> dem(m, std::vector<std::vector<double>>(n, std::vector<double>{1.0}));
  return GapInstance(std::move(caps), std::move(rates), std::move(weights), std::move(dem));
}

/// Uniform synthetic instance: w, r ~ U[0,1], capacity c in every dimension,
/// rates l_v ~ U[0,1] normalised to sum to one (so T arrivals are expected
/// over a horizon T).
inline GapInstance generate_synthetic_gap(std::size_t m, std::size_t n, std::size_t dim, double c, std::uint64_t seed) {
  if (m == 0 || n == 0 || dim == 0) throw std::invalid_argument("m, n, D must be >= 1");
  if (!(c >= 1.0)) throw std::invalid_argument("capacity c must be >= 1");
  Rng rng(mix_seed({seed, 0x5157ULL}));
  std::vector<std::vector<double>> weights(m, std::vector<double>(n));
  std::vector<std::vector<std::vector<double>>> demands(m, std::vector<std::vector<double>>(n, std::vector<double>(dim)));
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      weights[u][v] = rng.uniform();
      for (std::size_t d = 0; d < dim; ++d) demands[u][v][d] = rng.uniform();
    }
  std::vector<double> rates(n);
  double total = 0.0;
  // Rates must be strictly positive; an all-zero (or any zero) draw is resampled.
  do {
    total = 0.0;
    for (auto& l : rates) {
      do { l = rng.uniform(); } while (l == 0.0);
      total += l;
    }
  } while (!(total > 0.0));
  for (auto& l : rates) l /= total;
  std::vector<std::vector<double>> caps(m, std::vector<double>(dim, c));
  return GapInstance(std::move(caps), std::move(rates), std::move(weights), std::move(demands));
}

/// Same rewards and rates as `inst`, but unit capacity/demand with D = 1.
inline GapInstance to_matching(const GapInstance& inst) {
  return make_matching_instance(inst.weight_matrix(), inst.rates());
}

}  // namespace pgap
