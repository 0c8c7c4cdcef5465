#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace tlp {

/// Error model applied when synthesizing detections from ground truth.
/// All draws are taken from one seeded Rng in a fixed per-tick order, so a
/// (scenario, seed) pair replays identically.
struct NoiseModel {
  double miss_rate = 0.0;             // P(drop) per visible light per frame
  double false_positive_rate = 0.0;   // expected spurious detections per frame
  double state_confusion = 0.0;       // P(substitute a wrong state)
  double pictogram_confusion = 0.0;   // P(substitute a wrong pictogram)
  double pixel_sigma = 0.0;           // gaussian jitter of the bbox center, px
  Eigen::Vector3d localization_offset = Eigen::Vector3d::Zero();  // perceived-pose fault, m
  double confidence_lo = 1.0;
  double confidence_hi = 1.0;
  std::uint64_t seed = 0;
};

void validate_params(const NoiseModel& noise);

}  // namespace tlp
