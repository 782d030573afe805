#pragma once

#include <string>
#include <utility>
#include <vector>

#include "efmcg/colgen.hpp"
#include "efmcg/network.hpp"
#include "efmcg/oracle.hpp"

namespace efmcg {

inline constexpr const char* kToolVersion = "0.3.0";

// Sections "[modes]", "[summary]" and "[residuals]", tab-separated. The
// output depends only on the result, so identical runs give identical bytes.
std::string render_result_tsv(const Network& network, const ColGenResult& result);
std::string render_result_human(const Network& network, const ColGenResult& result);

std::string render_residuals_tsv(const std::vector<MetaboliteResidual>& residuals);

// One mode per line: folded flux and macroscopic reaction, then counts.
std::string render_enumeration(const Network& network, const Enumeration& enumeration);

struct RunManifest {
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, double>> timings;  // seconds per phase

  // key<TAB>value lines.
  std::string render() const;
};

// "R1:1,R3:-0.5" for the nonzero reactions of a folded flux.
std::string format_flux(const Network& network, const Eigen::VectorXd& folded);
std::string format_number(double value);

}  // namespace efmcg
