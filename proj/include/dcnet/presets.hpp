#pragma once

#include <string>
#include <vector>

#include "dcnet/inner_loop.hpp"
#include "dcnet/outer_loop.hpp"

namespace dcnet {

/// A named controller/weight set together with the nominal single-converter
/// plant it was designed for.
struct OuterPreset {
  std::string name;
  std::string description;
  OuterControllers controllers;
  WeightSet weights;
  InnerLoopDesign inner;
  double nominal_L = 0.0;
  double nominal_C = 0.0;
  double nominal_dprime = 1.0;
};

/// Built-in presets. Currently only "paper-vi": the sixth-order Kv, Kr,
/// eta = 1.2667 and the four loop-shaping weights, with the nominal plant
/// L = 0.12 mH, C = 500 uF, D' = 0.5.
const std::vector<OuterPreset>& builtin_presets();

/// Looks a preset up by name; throws ConfigError if it is unknown.
const OuterPreset& builtin_preset(const std::string& name);

}  // namespace dcnet
