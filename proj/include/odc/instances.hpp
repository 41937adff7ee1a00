#pragma once

#include <cstdint>

#include "odc/problem.hpp"

namespace odc {

// The 4x4 benchmark with five known connected components of the stabilizing
// set. D0 = I, diagonal mask; Q = I and R = I are defaults recorded in the
// run manifest.
ProblemInstance paper_4x4();

// A, B with i.i.d. N(0,1) entries; Q = R = D0 = I, diagonal mask.
// Deterministic per seed.
ProblemInstance random_instance(int n, int m, std::uint64_t seed);

}  // namespace odc
