#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "support/helpers.hpp"
#include "tlp/association.hpp"
#include "tlp/errors.hpp"
#include "tlp/rng.hpp"

using namespace tlp;

namespace {

// World-frame camera looking along +z with pixel x aligned to world x.
CameraModel axis_camera(const Eigen::Vector3d& origin = {0, 0, 0}) {
  CameraModel cam;
  cam.id = CameraId::front_medium;
  cam.fx = 1000;
  cam.fy = 1000;
  cam.cx = 960;
  cam.cy = 600;
  cam.width = 1920;
  cam.height = 1200;
  cam.origin = origin;
  return cam;
}

Detection centered_detection(double px, double py, LightClass cls = LightClass::red_circle,
                             double confidence = 0.9) {
  Detection det;
  det.timestamp_ns = 0;
  det.camera_id = CameraId::front_medium;
  det.bbox = {px - 2, py - 10, px + 2, py + 10};
  det.cls = cls;
  det.confidence = confidence;
  return det;
}

HdMap single_light_map(const Eigen::Vector3d& position) {
  MappedTrafficLight light;
  light.id = "tl1";
  light.position = position;
  light.pictogram = Pictogram::circle;
  light.group_id = "g1";
  SignalGroup group;
  group.id = "g1";
  group.members = {"tl1"};
  group.stop_line = position - Eigen::Vector3d(0, 0, position.z());
  return HdMap({light}, {group});
}

}  // namespace

TEST_CASE("zero detections give zero associations") {
  const HdMap map = single_light_map({0, 0, 50});
  const auto outcome =
      associate({}, axis_camera(), map, Eigen::Vector3d::Zero(), {0, 0, 1});
  CHECK(outcome.associations.empty());
  CHECK(outcome.unassociated.empty());
}

TEST_CASE("single detection passing 0.5 m from the only light") {
  // Light 0.5 m to the side of the optical axis at depth 50.
  const HdMap map = single_light_map({0.5, 0, 50});
  const std::vector<Detection> dets = {centered_detection(960, 600)};
  const auto outcome = associate(dets, axis_camera(), map, {0, 0, 0}, {0, 0, 1});
  REQUIRE(outcome.associations.size() == 1);
  CHECK(outcome.associations[0].light_id == "tl1");
  CHECK(outcome.associations[0].detection_index == 0);
  CHECK(outcome.associations[0].cost_m == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("costs at or above the accept threshold leave detections unassociated") {
  const HdMap map = single_light_map({2.5, 0, 50});
  const std::vector<Detection> dets = {centered_detection(960, 600)};
  const auto outcome = associate(dets, axis_camera(), map, {0, 0, 0}, {0, 0, 1});
  CHECK(outcome.associations.empty());
  REQUIRE(outcome.unassociated.size() == 1);
  CHECK(outcome.unassociated[0] == 0);
}

TEST_CASE("global matching survives a lateral localization fault that fools nearest-light") {
  // Two lights 2.4 m apart; the perceived camera pose is shifted 1.5 m
  // sideways. Each detection ray then passes ~1.5 m from its true light but
  // only ~0.9 m from the neighbor on one side, so per-detection nearest
  // assignment funnels both detections onto one light while the global
  // optimum keeps the true pairing.
  MappedTrafficLight left;
  left.id = "tl_left";
  left.position = {-1.2, 0, 50};
  left.pictogram = Pictogram::straight;
  left.group_id = "g_straight";
  MappedTrafficLight right = left;
  right.id = "tl_right";
  right.position = {1.2, 0, 50};
  right.pictogram = Pictogram::right;
  right.group_id = "g_right";
  SignalGroup gs;
  gs.id = "g_straight";
  gs.members = {"tl_left"};
  SignalGroup gr;
  gr.id = "g_right";
  gr.members = {"tl_right"};
  const HdMap map({left, right}, {gs, gr});

  // True camera at the origin: pixel centers of the two lights.
  const double px_left = 960 + 1000 * (-1.2 / 50);
  const double px_right = 960 + 1000 * (1.2 / 50);
  const std::vector<Detection> dets = {
      centered_detection(px_left, 600, LightClass::red_straight),
      centered_detection(px_right, 600, LightClass::red_right),
  };

  // The system believes the camera sits 1.5 m to the +x side.
  const CameraModel perceived = axis_camera({1.5, 0, 0});
  const Eigen::Vector3d perceived_pos(1.5, 0, 0);

  const auto global = associate(dets, perceived, map, perceived_pos, {0, 0, 1});
  REQUIRE(global.associations.size() == 2);
  CHECK(global.associations[0].light_id == "tl_left");
  CHECK(global.associations[1].light_id == "tl_right");
  CHECK(global.associations[0].cost_m == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(global.associations[1].cost_m == doctest::Approx(1.5).epsilon(1e-3));

  const auto nearest = associate_nearest(dets, perceived, map, perceived_pos, {0, 0, 1});
  REQUIRE(nearest.associations.size() == 2);
  CHECK(nearest.associations[0].light_id == "tl_right");  // wrong light
  CHECK(nearest.associations[1].light_id == "tl_right");
}

TEST_CASE("accept must not exceed cap") {
  AssociationParams params;
  params.accept_m = 15.0;
  CHECK_THROWS_AS(validate_params(params), ValidationError);
  params = {};
  params.region_m = -1.0;
  CHECK_THROWS_AS(validate_params(params), ValidationError);
}

TEST_CASE("detection validation") {
  const CameraModel cam = axis_camera();
  Detection det = centered_detection(960, 600);

  SUBCASE("confidence out of range") {
    det.confidence = 1.3;
    CHECK_THROWS_AS(validate_detection(det), ValidationError);
  }
  SUBCASE("unordered corners") {
    std::swap(det.bbox[0], det.bbox[2]);
    CHECK_THROWS_AS(validate_detection(det), ValidationError);
  }
  SUBCASE("outside the frame") {
    det.bbox = {1900, 500, 1930, 520};
    CHECK_THROWS_AS(validate_detection(det, cam), ValidationError);
  }
  SUBCASE("wrong camera") {
    det.camera_id = CameraId::front_tele;
    CHECK_THROWS_AS(validate_detection(det, cam), ValidationError);
  }
}

TEST_CASE("random frames: one-to-one, capped, no dummies, threshold respected") {
  Rng rng(2718);
  for (int round = 0; round < 60; ++round) {
    // Random map of up to 8 lights ahead of the camera.
    std::vector<MappedTrafficLight> lights;
    SignalGroup group;
    group.id = "g";
    const int n_lights = 1 + static_cast<int>(rng.uniform_int(8));
    for (int i = 0; i < n_lights; ++i) {
      MappedTrafficLight light;
      light.id = "tl" + std::to_string(i);
      light.group_id = "g";
      light.position = {rng.uniform(-30, 30), rng.uniform(-15, 15), rng.uniform(20, 170)};
      group.members.push_back(light.id);
      lights.push_back(light);
    }
    const HdMap map(lights, {group});

    const int n_dets = static_cast<int>(rng.uniform_int(8));
    std::vector<Detection> dets;
    for (int i = 0; i < n_dets; ++i) {
      dets.push_back(
          centered_detection(rng.uniform(20, 1900), rng.uniform(20, 1180)));
    }

    const auto outcome = associate(dets, axis_camera(), map, {0, 0, 0}, {0, 0, 1});

    std::set<int> seen_dets;
    std::set<std::string> seen_lights;
    for (const auto& assoc : outcome.associations) {
      CHECK(assoc.cost_m < 2.0);
      CHECK(map.find_light(assoc.light_id) != nullptr);
      CHECK(seen_dets.insert(assoc.detection_index).second);
      CHECK(seen_lights.insert(assoc.light_id).second);
    }
    CHECK(outcome.associations.size() + outcome.unassociated.size() == dets.size());
  }
}

TEST_CASE("associations are invariant under a rigid transform of the whole scene") {
  Rng rng(1618);
  for (int round = 0; round < 40; ++round) {
    std::vector<MappedTrafficLight> lights;
    SignalGroup group;
    group.id = "g";
    const int n_lights = 2 + static_cast<int>(rng.uniform_int(5));
    for (int i = 0; i < n_lights; ++i) {
      MappedTrafficLight light;
      light.id = "tl" + std::to_string(i);
      light.group_id = "g";
      light.position = {rng.uniform(-20, 20), rng.uniform(-10, 10), rng.uniform(20, 150)};
      group.members.push_back(light.id);
      lights.push_back(light);
    }
    std::vector<Detection> dets;
    for (int i = 0; i < 4; ++i) {
      dets.push_back(centered_detection(rng.uniform(20, 1900), rng.uniform(20, 1180)));
    }
    const CameraModel cam = axis_camera();
    const Eigen::Vector3d ego_pos(0, 0, 0);
    const Eigen::Vector3d heading(0, 0, 1);

    const HdMap map(lights, {group});
    const auto base = associate(dets, cam, map, ego_pos, heading);

    const Eigen::Matrix3d q = tlp::testing::random_rotation(rng);
    const Eigen::Vector3d shift(rng.uniform(-50, 50), rng.uniform(-50, 50),
                                rng.uniform(-50, 50));
    // The region test needs a non-vertical heading; skip unlucky rotations.
    const Eigen::Vector3d new_heading = q * heading;
    if (std::abs(new_heading.z()) > 0.99) continue;

    std::vector<MappedTrafficLight> moved_lights = lights;
    for (auto& light : moved_lights) light.position = q * light.position + shift;
    const HdMap moved_map(moved_lights, {group});
    CameraModel moved_cam = cam;
    moved_cam.rotation = q * cam.rotation;
    moved_cam.origin = q * cam.origin + shift;

    const auto moved = associate(dets, moved_cam, moved_map, q * ego_pos + shift, new_heading);

    REQUIRE(moved.associations.size() == base.associations.size());
    for (std::size_t i = 0; i < base.associations.size(); ++i) {
      CHECK(moved.associations[i].detection_index == base.associations[i].detection_index);
      CHECK(moved.associations[i].light_id == base.associations[i].light_id);
      CHECK(moved.associations[i].cost_m ==
            doctest::Approx(base.associations[i].cost_m).epsilon(1e-9));
    }
  }
}

TEST_CASE("off-class detections participate in association") {
  const HdMap map = single_light_map({0, 0, 60});
  const std::vector<Detection> dets = {centered_detection(960, 600, LightClass::off)};
  const auto outcome = associate(dets, axis_camera(), map, {0, 0, 0}, {0, 0, 1});
  REQUIRE(outcome.associations.size() == 1);
  CHECK(outcome.associations[0].light_id == "tl1");
}
