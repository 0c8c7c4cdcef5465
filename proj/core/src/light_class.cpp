#include "tlp/light_class.hpp"

#include "tlp/errors.hpp"

namespace tlp {

namespace {

constexpr int state_index(SignalState s) {
  switch (s) {
    case SignalState::green: return 0;
    case SignalState::red: return 1;
    case SignalState::yellow: return 2;
    case SignalState::red_yellow: return 3;
    default: return -1;
  }
}

}  // namespace

SignalState state_of(LightClass cls) {
  const int v = static_cast<int>(cls);
  if (cls == LightClass::off) return SignalState::off;
  switch (v / 6) {
    case 0: return SignalState::green;
    case 1: return SignalState::red;
    case 2: return SignalState::yellow;
    default: return SignalState::red_yellow;
  }
}

std::optional<Pictogram> pictogram_of(LightClass cls) {
  if (cls == LightClass::off) return std::nullopt;
  return kAllPictograms[static_cast<std::size_t>(static_cast<int>(cls) % 6)];
}

LightClass make_light_class(SignalState state, Pictogram pictogram) {
  if (state == SignalState::off) return LightClass::off;
  const int si = state_index(state);
  if (si < 0) throw ValidationError("cannot build a light class from state 'unknown'");
  return static_cast<LightClass>(si * 6 + static_cast<int>(pictogram));
}

std::string to_string(Pictogram p) {
  switch (p) {
    case Pictogram::circle: return "circle";
    case Pictogram::straight: return "straight";
    case Pictogram::left: return "left";
    case Pictogram::right: return "right";
    case Pictogram::straight_left: return "straight_left";
    case Pictogram::straight_right: return "straight_right";
  }
  throw ValidationError("invalid pictogram value");
}

std::string to_string(SignalState s) {
  switch (s) {
    case SignalState::green: return "green";
    case SignalState::red: return "red";
    case SignalState::yellow: return "yellow";
    case SignalState::red_yellow: return "red_yellow";
    case SignalState::off: return "off";
    case SignalState::unknown: return "unknown";
  }
  throw ValidationError("invalid signal state value");
}

std::string to_string(LightClass cls) {
  if (cls == LightClass::off) return "off";
  return to_string(state_of(cls)) + "_" + to_string(*pictogram_of(cls));
}

Pictogram pictogram_from_string(std::string_view s) {
  for (Pictogram p : kAllPictograms) {
    if (to_string(p) == s) return p;
  }
  throw ParseError("unknown pictogram '" + std::string(s) +
                   "' (expected circle|straight|left|right|straight_left|straight_right)");
}

SignalState signal_state_from_string(std::string_view s) {
  for (SignalState st : kDisplayableStates) {
    if (to_string(st) == s) return st;
  }
  if (s == "unknown") return SignalState::unknown;
  throw ParseError("unknown signal state '" + std::string(s) +
                   "' (expected green|red|yellow|red_yellow|off)");
}

LightClass light_class_from_string(std::string_view s) {
  for (int v = 0; v < kLightClassCount; ++v) {
    const auto cls = static_cast<LightClass>(v);
    if (to_string(cls) == s) return cls;
  }
  throw ParseError("unknown light class '" + std::string(s) + "'");
}

}  // namespace tlp
