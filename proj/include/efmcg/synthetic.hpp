#pragma once

// Random networks and data sets for tests, the acceptance run and the
// benchmark. Everything is driven by an explicit seed.

#include <cstdint>
#include <random>

#include "efmcg/measurements.hpp"
#include "efmcg/network.hpp"

namespace efmcg::synthetic {

struct RandomNetworkSpec {
  std::size_t min_internal = 4;
  std::size_t max_internal = 8;
  std::size_t min_extended = 8;   // extended columns, reversible reactions count twice
  std::size_t max_extended = 12;
  std::size_t min_external = 2;
  std::size_t max_external = 4;
  double reversible_fraction = 0.3;
};

Network random_network(std::mt19937_64& rng, const RandomNetworkSpec& spec = {});

// Gaussian values around a per-metabolite base, `min_reps..max_reps`
// repetitions; each cell missing with probability `missing`, but every
// repetition keeps at least one value.
MeasurementSet random_measurements(std::mt19937_64& rng, const Network& network, std::size_t min_reps = 1,
                                   std::size_t max_reps = 3, double missing = 0.0);

// A network of genome-scale-model texture: ~100 reactions, ~70 internal and
// 24 external metabolites, ~29 reversible reactions.
Network scale_network(std::uint64_t seed);

// Data generated from a positive combination of `sources` feasible fluxes
// (subproblem vertices under random costs) plus relative Gaussian noise.
MeasurementSet consistent_measurements(std::mt19937_64& rng, const Network& network, std::size_t repetitions,
                                       double noise, std::size_t sources = 3);

}  // namespace efmcg::synthetic
