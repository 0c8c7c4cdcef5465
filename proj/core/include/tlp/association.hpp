#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tlp/geometry.hpp"
#include "tlp/hdmap.hpp"
#include "tlp/light_class.hpp"

namespace tlp {

/// One classified bounding box as produced by the detector.
struct Detection {
  std::int64_t timestamp_ns = 0;
  CameraId camera_id = CameraId::front_medium;
  std::array<double, 4> bbox{0, 0, 0, 0};  // x1, y1, x2, y2, pixels
  LightClass cls = LightClass::off;
  double confidence = 0.0;
};

Eigen::Vector2d bbox_center(const Detection& det);

/// Checks confidence range and corner ordering; with a camera, also that the
/// box lies inside the frame.
void validate_detection(const Detection& det);
void validate_detection(const Detection& det, const CameraModel& camera);

/// Square cost matrix over detection rays (rows) and map lights (columns).
/// Entries are ray-to-light distances in meters, capped; whichever side is
/// smaller is padded with dummy rows/columns whose entries all equal the cap.
/// Dummies sit at indices >= real_rows() / real_cols().
class CostMatrix {
 public:
  CostMatrix() = default;

  /// Raw constructor, mainly for tests and the solver's own contract checks.
  /// Rows must be rectangular; real_rows/real_cols default to all.
  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int real_rows() const { return real_rows_; }
  int real_cols() const { return real_cols_; }
  bool row_is_dummy(int r) const { return r >= real_rows_; }
  bool col_is_dummy(int c) const { return c >= real_cols_; }

  double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

 private:
  friend CostMatrix build_cost_matrix(std::span<const Ray>,
                                      std::span<const MappedTrafficLight* const>, double);
  int rows_ = 0;
  int cols_ = 0;
  int real_rows_ = 0;
  int real_cols_ = 0;
  std::vector<double> data_;
};

/// Builds the capped, padded cost matrix. Empty inputs give an empty matrix.
CostMatrix build_cost_matrix(std::span<const Ray> rays,
                             std::span<const MappedTrafficLight* const> lights,
                             double cap_m = 10.0);

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // (row, col), sorted by row
  double total_cost = 0.0;
};

/// Minimum-cost perfect matching on a square matrix, O(n^3) Kuhn-Munkres
/// with potentials. Among multiple optima, returns the lexicographically
/// smallest assignment by (row, col) so replays are deterministic. Non-square
/// matrices or negative entries are contract violations.
Matching hungarian_min_cost(const CostMatrix& matrix);

struct AssociationParams {
  double region_m = 180.0;
  double cap_m = 10.0;
  double accept_m = 2.0;
};

/// Throws ValidationError unless all parameters are positive and
/// accept_m <= cap_m.
void validate_params(const AssociationParams& params);

struct Association {
  int detection_index = -1;
  std::string light_id;
  double cost_m = 0.0;
};

struct AssociationOutcome {
  std::vector<Association> associations;  // cost < accept, real-to-real only
  std::vector<int> unassociated;          // detection indices left unmatched
};

/// Full per-frame association: pixel rays -> in-region lights -> cost matrix
/// -> global matching -> acceptance threshold. Detections matched to dummies
/// or at cost >= accept_m end up in `unassociated`.
AssociationOutcome associate(std::span<const Detection> detections, const CameraModel& camera,
                             const HdMap& map, const Eigen::Vector3d& ego_position,
                             const Eigen::Vector3d& ego_heading,
                             const AssociationParams& params = {});

/// Baseline used for comparisons: each detection independently takes its
/// nearest in-region light under the same cap and acceptance threshold, with
/// no one-to-one constraint. This is the scheme global matching replaces.
AssociationOutcome associate_nearest(std::span<const Detection> detections,
                                     const CameraModel& camera, const HdMap& map,
                                     const Eigen::Vector3d& ego_position,
                                     const Eigen::Vector3d& ego_heading,
                                     const AssociationParams& params = {});

}  // namespace tlp
