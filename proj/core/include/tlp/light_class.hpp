#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace tlp {

/// Directional symbol on a traffic light lens. The dark two-bulb on-demand
/// housing has no pictogram of its own; it is modeled through the `off`
/// detection class below and a `circle` pictogram in the map.
enum class Pictogram {
  circle,
  straight,
  left,
  right,
  straight_left,
  straight_right,
};

inline constexpr std::array<Pictogram, 6> kAllPictograms = {
    Pictogram::circle,        Pictogram::straight,      Pictogram::left,
    Pictogram::right,         Pictogram::straight_left, Pictogram::straight_right,
};

/// Signal colors plus `off` (dark on-demand light) and `unknown`. Phase
/// schedules and detections use the first five; `unknown` only ever appears
/// in decisions, never in ground truth or detection classes.
enum class SignalState {
  green,
  red,
  yellow,
  red_yellow,
  off,
  unknown,
};

inline constexpr std::array<SignalState, 5> kDisplayableStates = {
    SignalState::green, SignalState::red, SignalState::yellow,
    SignalState::red_yellow, SignalState::off,
};

/// The 25 detection classes: {green, red, yellow, red_yellow} x 6 pictograms
/// plus the single `off` class.
enum class LightClass : int {
  green_circle = 0,
  green_straight,
  green_left,
  green_right,
  green_straight_left,
  green_straight_right,
  red_circle,
  red_straight,
  red_left,
  red_right,
  red_straight_left,
  red_straight_right,
  yellow_circle,
  yellow_straight,
  yellow_left,
  yellow_right,
  yellow_straight_left,
  yellow_straight_right,
  red_yellow_circle,
  red_yellow_straight,
  red_yellow_left,
  red_yellow_right,
  red_yellow_straight_left,
  red_yellow_straight_right,
  off,
};

inline constexpr int kLightClassCount = 25;

/// Color component of a detection class; never `unknown`.
SignalState state_of(LightClass cls);

/// Pictogram component; empty for the `off` class.
std::optional<Pictogram> pictogram_of(LightClass cls);

/// Builds a class from its components. `off` maps to LightClass::off
/// regardless of pictogram; `unknown` is rejected.
LightClass make_light_class(SignalState state, Pictogram pictogram);

std::string to_string(Pictogram p);
std::string to_string(SignalState s);
std::string to_string(LightClass cls);

Pictogram pictogram_from_string(std::string_view s);
SignalState signal_state_from_string(std::string_view s);
LightClass light_class_from_string(std::string_view s);

}  // namespace tlp
