#pragma once

#include "aitc/data_model.hpp"
#include "aitc/simharness.hpp"

// The two-trial worked example: race (Black vs non-Black) as the sole binary
// effect modifier, binary outcome with Y=0 as the survival event.  Also the
// explicitly constructed overlap population and the simulation scenario that
// reproduces the example's cell probabilities.

namespace aitc::fixtures {

IpdTrial hypothetical_ac();
IpdTrial hypothetical_bc();
AgdSummary hypothetical_ac_agd();  // summarize_ipd of the AC trial
AgdSummary hypothetical_bc_agd();

// Overlap population constructed explicitly (integer-count version of the
// overlap-weighted trials).
IpdTrial overlap_ac();
IpdTrial overlap_bc();

// Monte Carlo scenario with the same stratum/arm cell probabilities.
ScenarioSpec paradox_scenario(std::size_t n_per_arm = 600,
                              std::size_t replicates = 1000,
                              std::uint64_t master_seed = 424242);

// One-continuous-covariate smoke scenario for protocol-2 consistency checks.
ScenarioSpec continuous_scenario(std::size_t n_per_arm,
                                 std::size_t replicates,
                                 std::uint64_t master_seed);

}  // namespace aitc::fixtures
