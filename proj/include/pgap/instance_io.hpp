#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pgap/instance.hpp"

namespace pgap {

inline nlohmann::json to_json(const GapInstance& inst) {
  return nlohmann::json{{"dim", inst.dim()},
                        {"capacities", inst.capacity_matrix()},
                        {"weights", inst.weight_matrix()},
                        {"demands", inst.demand_tensor()},
                        {"rates", inst.rates()}};
}

inline GapInstance instance_from_json(const nlohmann::json& j) {
  auto caps = j.at("capacities").get<std::vector<std::vector<double>>>();
  auto inst = GapInstance(std::move(caps), j.at("rates").get<std::vector<double>>(),
                          j.at("weights").get<std::vector<std::vector<double>>>(),
                          j.at("demands").get<std::vector<std::vector<std::vector<double>>>>());
  if (j.contains("dim") && j.at("dim").get<std::size_t>() != inst.dim())
    throw std::invalid_argument("instance json: dim does not match capacity length");
  return inst;
}

inline void save_instance(const GapInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_json(inst).dump(2) << '\n';
}

inline GapInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return instance_from_json(nlohmann::json::parse(in));
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Reads a three-column numeric CSV with a mandatory header. Rows are numbered
// from 1 for the header, so the first data row is row 2.
inline std::vector<std::array<double, 3>> read_three_column_csv(const std::string& path, std::string_view header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::size_t row = 0;
  bool seen_header = false;
  std::vector<std::array<double, 3>> rows;
  while (std::getline(in, line)) {
    ++row;
    auto text = trim(line);
    if (!seen_header) {
      if (text != header)
        throw std::runtime_error(path + ": row " + std::to_string(row) + ": expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    if (text.empty()) continue;
    std::array<double, 3> vals{};
    std::size_t col = 0;
    while (true) {
      auto comma = text.find(',');
      auto field = trim(text.substr(0, comma));
      if (col >= 3) throw std::runtime_error(path + ": row " + std::to_string(row) + ": too many columns");
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::runtime_error(path + ": row " + std::to_string(row) + ": malformed number '" + std::string(field) + "'");
      if (!std::isfinite(v)) throw std::runtime_error(path + ": row " + std::to_string(row) + ": non-finite value");
      vals[col++] = v;
      if (comma == std::string_view::npos) break;
      text.remove_prefix(comma + 1);
    }
    if (col != 3) throw std::runtime_error(path + ": row " + std::to_string(row) + ": expected 3 columns");
    rows.push_back(vals);
  }
  if (!seen_header) throw std::runtime_error(path + ": empty file");
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  return rows;
}

struct CellGroup {
  double sum_x = 0.0, sum_y = 0.0, sum_value = 0.0;
  std::size_t count = 0;
  double cx() const { return sum_x / static_cast<double>(count); }
  double cy() const { return sum_y / static_cast<double>(count); }
  double mean_value() const { return sum_value / static_cast<double>(count); }
};

using CellKey = std::pair<long long, long long>;

inline std::map<CellKey, CellGroup> group_by_cell(const std::vector<std::array<double, 3>>& rows, double dx, double dy) {
  std::map<CellKey, CellGroup> cells;
  for (const auto& r : rows) {
    CellKey key{static_cast<long long>(std::floor(r[0] / dx)), static_cast<long long>(std::floor(r[1] / dy))};
    auto& g = cells[key];
    g.sum_x += r[0];
    g.sum_y += r[1];
    g.sum_value += r[2];
    ++g.count;
  }
  return cells;
}

}  // namespace detail

/// Builds a matching instance from worker (online) and task (offline) CSVs.
///
/// Workers and tasks are bucketed into (floor(x/dx), floor(y/dy)) cells; each
/// worker cell is an item type with rate proportional to its population and
/// each task cell is a unit-capacity bin. A pair gets reward
/// mean_success * mean_payoff when the member centroids of the two cells are
/// within `distance_threshold`, and 0 otherwise. Cells are ordered by key.
inline GapInstance ingest_worker_task_csv(const std::string& workers_path, const std::string& tasks_path, double dx,
                                          double dy, double distance_threshold) {
  if (!(dx > 0.0) || !(dy > 0.0) || !(distance_threshold > 0.0))
    throw std::invalid_argument("dx, dy and distance threshold must be > 0");
  auto workers = detail::read_three_column_csv(workers_path, "x,y,success_rate");
  auto tasks = detail::read_three_column_csv(tasks_path, "x,y,payoff");
  auto worker_cells = detail::group_by_cell(workers, dx, dy);
  auto task_cells = detail::group_by_cell(tasks, dx, dy);

  std::vector<double> rates;
  for (const auto& [key, g] : worker_cells) rates.push_back(static_cast<double>(g.count) / static_cast<double>(workers.size()));

  std::vector<std::vector<double>> weights;
  for (const auto& [tkey, task] : task_cells) {
    auto& row = weights.emplace_back();
    for (const auto& [wkey, worker] : worker_cells) {
      double dist = std::hypot(task.cx() - worker.cx(), task.cy() - worker.cy());
      row.push_back(dist <= distance_threshold ? worker.mean_value() * task.mean_value() : 0.0);
    }
  }
  return make_matching_instance(std::move(weights), std::move(rates));
}

}  // namespace pgap
