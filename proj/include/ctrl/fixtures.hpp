#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctrl/toy.hpp"

namespace ctrl::toy {

struct Fixture {
  std::string name;
  std::string description;
  std::string ir_text;
  Model triggering_input;
  // Rendering offset suggested for overflow-size scoring (value - buffer
  // size), applied by the scoring pipeline, not the extraction.
  std::int64_t score_offset = 0;
};

const std::vector<Fixture>& builtin_fixtures();
const Fixture& fixture_by_name(const std::string& name);  // throws Error

}  // namespace ctrl::toy
