#pragma once

#include <string>

#include "efmcg/measurements.hpp"
#include "efmcg/network.hpp"

namespace fixtures {

inline const char* kToyA =
    "external: A B C\n"
    "R1 : A -> M\n"
    "R2 : M -> B\n"
    "R3 : M -> C\n";

inline const char* kToyB =
    "external: A B C\n"
    "R1 : A -> M\n"
    "R2 : M -> B\n"
    "R3 : M <-> C\n";

inline const char* kToyC = "metabolite\trep1\nA\t-1\nB\t0.6\nC\t0.4\n";

inline efmcg::Network toy_a() { return efmcg::parse_network(kToyA); }
inline efmcg::Network toy_b() { return efmcg::parse_network(kToyB); }

inline std::string data_dir() { return EFMCG_DATA_DIR; }

}  // namespace fixtures
