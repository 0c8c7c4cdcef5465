#include "tlp/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tlp/errors.hpp"

namespace tlp {

Eigen::Vector2d bbox_center(const Detection& det) {
  return {(det.bbox[0] + det.bbox[2]) / 2.0, (det.bbox[1] + det.bbox[3]) / 2.0};
}

void validate_detection(const Detection& det) {
  if (!(det.confidence >= 0.0 && det.confidence <= 1.0)) {
    throw ValidationError("detection confidence " + std::to_string(det.confidence) +
                          " outside [0, 1]");
  }
  if (!(det.bbox[0] < det.bbox[2]) || !(det.bbox[1] < det.bbox[3])) {
    throw ValidationError("detection bbox corners must satisfy x1 < x2 and y1 < y2");
  }
}

void validate_detection(const Detection& det, const CameraModel& camera) {
  validate_detection(det);
  if (det.camera_id != camera.id) {
    throw ValidationError("detection from camera '" + to_string(det.camera_id) +
                          "' handed to camera '" + to_string(camera.id) + "'");
  }
  if (det.bbox[0] < 0.0 || det.bbox[1] < 0.0 || det.bbox[2] > camera.width ||
      det.bbox[3] > camera.height) {
    std::ostringstream msg;
    msg << "detection bbox [" << det.bbox[0] << ", " << det.bbox[1] << ", " << det.bbox[2] << ", "
        << det.bbox[3] << "] outside the " << camera.width << "x" << camera.height << " frame";
    throw ValidationError(msg.str());
  }
}

CostMatrix CostMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  CostMatrix m;
  m.rows_ = static_cast<int>(rows.size());
  m.cols_ = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != m.cols_) {
      throw ValidationError("cost matrix rows have unequal lengths");
    }
    m.data_.insert(m.data_.end(), row.begin(), row.end());
  }
  m.real_rows_ = m.rows_;
  m.real_cols_ = m.cols_;
  return m;
}

CostMatrix build_cost_matrix(std::span<const Ray> rays,
                             std::span<const MappedTrafficLight* const> lights, double cap_m) {
  if (!(cap_m > 0.0)) throw ValidationError("cost cap must be positive");
  CostMatrix m;
  m.real_rows_ = static_cast<int>(rays.size());
  m.real_cols_ = static_cast<int>(lights.size());
  const int n = std::max(m.real_rows_, m.real_cols_);
  m.rows_ = n;
  m.cols_ = n;
  m.data_.assign(static_cast<std::size_t>(n) * n, cap_m);  // dummy entries equal the cap
  for (int i = 0; i < m.real_rows_; ++i) {
    for (int j = 0; j < m.real_cols_; ++j) {
      const double d = ray_point_distance(rays[i], lights[j]->position);
      m.data_[static_cast<std::size_t>(i) * n + j] = std::min(d, cap_m);
    }
  }
  return m;
}

namespace {

constexpr double kCostEps = 1e-9;

struct SolveResult {
  std::vector<int> col_of_row;  // positions within the column subset
  std::vector<double> row_potential;
  std::vector<double> col_potential;
  double total = 0.0;
};

// Kuhn-Munkres with potentials, O(n^3). Operates on a subset of rows and
// columns of the full matrix so the lexicographic refinement below can re-run
// it on residual problems.
SolveResult solve_assignment(const CostMatrix& m, std::span<const int> row_ids,
                             std::span<const int> col_ids) {
  const int n = static_cast<int>(row_ids.size());
  SolveResult result;
  result.col_of_row.assign(n, -1);
  result.row_potential.assign(n, 0.0);
  result.col_potential.assign(n, 0.0);
  if (n == 0) return result;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> matched_row(n + 1, 0);  // matched_row[j]: row occupying column j (1-based)
  std::vector<int> way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    matched_row[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = matched_row[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = m.at(row_ids[i0 - 1], col_ids[j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[matched_row[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (matched_row[j0] != 0);
    do {
      const int j1 = way[j0];
      matched_row[j0] = matched_row[j1];
      j0 = j1;
    } while (j0);
  }

  for (int j = 1; j <= n; ++j) {
    if (matched_row[j] > 0) result.col_of_row[matched_row[j] - 1] = j - 1;
  }
  for (int i = 0; i < n; ++i) {
    result.row_potential[i] = u[i + 1];
    result.col_potential[i] = v[i + 1];
    result.total += m.at(row_ids[i], col_ids[result.col_of_row[i]]);
  }
  return result;
}

}  // namespace

Matching hungarian_min_cost(const CostMatrix& matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw ValidationError("hungarian_min_cost requires a square matrix, got " +
                          std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()));
  }
  const int n = matrix.rows();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double c = matrix.at(i, j);
      if (!std::isfinite(c) || c < 0.0) {
        throw ValidationError("cost matrix entries must be finite and non-negative, entry (" +
                              std::to_string(i) + ", " + std::to_string(j) + ") is " +
                              std::to_string(c));
      }
    }
  }

  Matching matching;
  if (n == 0) return matching;

  std::vector<int> all_ids(n);
  std::iota(all_ids.begin(), all_ids.end(), 0);
  const SolveResult base = solve_assignment(matrix, all_ids, all_ids);
  const double optimum = base.total;

  // Among all optimal matchings, pick the lexicographically smallest
  // assignment by (row, col): fix rows in order, trying columns in ascending
  // order. A column with positive reduced cost under the optimal potentials
  // can appear in no optimal matching, which prunes almost everything when
  // the optimum is unique; surviving candidates are verified by re-solving
  // the residual problem.
  std::vector<int> chosen(n, -1);
  std::vector<int> current = base.col_of_row;  // known-optimal completion
  std::vector<int> avail(n);
  std::iota(avail.begin(), avail.end(), 0);
  double fixed_cost = 0.0;

  for (int row = 0; row < n; ++row) {
    const int incumbent = current[row];
    int accepted = -1;
    std::vector<int> sub_rows(all_ids.begin() + row + 1, all_ids.end());
    for (std::size_t k = 0; k < avail.size(); ++k) {
      const int col = avail[k];
      if (col == incumbent) {
        accepted = col;
        break;
      }
      const double reduced =
          matrix.at(row, col) - base.row_potential[row] - base.col_potential[col];
      if (reduced > kCostEps) continue;
      std::vector<int> sub_cols;
      sub_cols.reserve(avail.size() - 1);
      for (const int c : avail) {
        if (c != col) sub_cols.push_back(c);
      }
      const SolveResult sub = solve_assignment(matrix, sub_rows, sub_cols);
      if (fixed_cost + matrix.at(row, col) + sub.total <= optimum + kCostEps) {
        accepted = col;
        for (int r = row + 1; r < n; ++r) {
          current[r] = sub_cols[sub.col_of_row[r - row - 1]];
        }
        break;
      }
    }
    chosen[row] = accepted;
    fixed_cost += matrix.at(row, accepted);
    avail.erase(std::find(avail.begin(), avail.end(), accepted));
  }

  matching.pairs.reserve(n);
  for (int row = 0; row < n; ++row) {
    matching.pairs.emplace_back(row, chosen[row]);
    matching.total_cost += matrix.at(row, chosen[row]);
  }
  return matching;
}

void validate_params(const AssociationParams& params) {
  if (!(params.region_m > 0.0) || !(params.cap_m > 0.0) || !(params.accept_m > 0.0)) {
    throw ValidationError("association parameters must be positive");
  }
  if (params.accept_m > params.cap_m) {
    throw ValidationError("accept threshold (" + std::to_string(params.accept_m) +
                          " m) must not exceed the cost cap (" + std::to_string(params.cap_m) +
                          " m)");
  }
}

namespace {

std::vector<Ray> detection_rays(std::span<const Detection> detections, const CameraModel& camera) {
  std::vector<Ray> rays;
  rays.reserve(detections.size());
  for (const auto& det : detections) {
    validate_detection(det, camera);
    rays.push_back(pixel_ray(camera, bbox_center(det)));
  }
  return rays;
}

}  // namespace

AssociationOutcome associate(std::span<const Detection> detections, const CameraModel& camera,
                             const HdMap& map, const Eigen::Vector3d& ego_position,
                             const Eigen::Vector3d& ego_heading,
                             const AssociationParams& params) {
  validate_params(params);
  AssociationOutcome outcome;
  if (detections.empty()) return outcome;

  const std::vector<Ray> rays = detection_rays(detections, camera);
  const auto lights = lights_in_region(map, ego_position, ego_heading, params.region_m);
  const CostMatrix matrix = build_cost_matrix(rays, lights, params.cap_m);
  const Matching matching = hungarian_min_cost(matrix);

  for (const auto& [row, col] : matching.pairs) {
    if (matrix.row_is_dummy(row)) continue;
    const double cost = matrix.at(row, col);
    if (!matrix.col_is_dummy(col) && cost < params.accept_m) {
      outcome.associations.push_back(Association{row, lights[col]->id, cost});
    } else {
      outcome.unassociated.push_back(row);
    }
  }
  std::sort(outcome.unassociated.begin(), outcome.unassociated.end());
  return outcome;
}

AssociationOutcome associate_nearest(std::span<const Detection> detections,
                                     const CameraModel& camera, const HdMap& map,
                                     const Eigen::Vector3d& ego_position,
                                     const Eigen::Vector3d& ego_heading,
                                     const AssociationParams& params) {
  validate_params(params);
  AssociationOutcome outcome;
  if (detections.empty()) return outcome;

  const std::vector<Ray> rays = detection_rays(detections, camera);
  const auto lights = lights_in_region(map, ego_position, ego_heading, params.region_m);

  for (std::size_t i = 0; i < rays.size(); ++i) {
    const MappedTrafficLight* best = nullptr;
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto* light : lights) {
      const double d = std::min(ray_point_distance(rays[i], light->position), params.cap_m);
      if (d < best_cost) {
        best_cost = d;
        best = light;
      }
    }
    if (best != nullptr && best_cost < params.accept_m) {
      outcome.associations.push_back(Association{static_cast<int>(i), best->id, best_cost});
    } else {
      outcome.unassociated.push_back(static_cast<int>(i));
    }
  }
  return outcome;
}

}  // namespace tlp
