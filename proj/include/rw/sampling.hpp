#pragma once

#include <cstdint>
#include <vector>

#include "rw/geometry.hpp"

namespace rw {

// Halton points in `box` with a seeded Cranley-Patterson rotation.
// Same (box, count, seed) gives bitwise-identical points.
std::vector<std::vector<double>> sample_points(const Box& box, int count, std::uint64_t seed);

}  // namespace rw
