#pragma once

// Seeded synthetic ground-truth joints: flat-Dirichlet draws over the
// simplex and chain-structured joints with random factor rows. These stand
// in for trained model probabilities in experiments and tests.

#include <cstdint>
#include <vector>

#include "maxent/table.hpp"

namespace maxent {

// Dirichlet(1)-uniform over the simplex.
JointTable random_joint(std::vector<int> vars, Alphabet alphabet, std::uint64_t seed);

// Product of random conditional rows p(x_i | min(order, i) predecessors),
// each row Dirichlet(1).
JointTable random_markov_joint(std::vector<int> vars, Alphabet alphabet, int order,
                               std::uint64_t seed);

}  // namespace maxent
