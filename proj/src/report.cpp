#include "efmcg/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace efmcg {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0 as well
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string format_flux(const Network& network, const Eigen::VectorXd& folded) {
  const double scale = folded.size() ? folded.lpNorm<Eigen::Infinity>() : 0.0;
  std::string out;
  for (Eigen::Index j = 0; j < folded.size(); ++j) {
    if (std::abs(folded(j)) <= 1e-12 * scale) continue;
    if (!out.empty()) out += ",";
    out += network.reactions()[static_cast<std::size_t>(j)].id + ":" + format_number(folded(j));
  }
  return out.empty() ? "-" : out;
}

namespace {

double rendered_weight(const ColGenResult& r, std::size_t l) {
  return r.weights(static_cast<Eigen::Index>(l)) / r.rendered[l].factor;
}

}  // namespace

std::string render_result_tsv(const Network& network, const ColGenResult& result) {
  std::ostringstream out;
  out << "[modes]\n";
  out << "id\tmacroscopic_reaction\tw\tflux\n";
  for (std::size_t l = 0; l < result.modes.size(); ++l) {
    // Flux printed at the same scale as the rendered reaction.
    const Eigen::VectorXd flux = result.modes[l].folded * result.rendered[l].factor;
    out << l + 1 << '\t' << result.rendered[l].text << '\t' << format_number(rendered_weight(result, l)) << '\t'
        << format_flux(network, flux) << '\n';
  }
  out << "[summary]\n";
  out << "objective\t" << format_number(result.objective) << '\n';
  out << "certified\t" << (result.certified ? "true" : "false") << '\n';
  out << "iterations\t" << result.iterations << '\n';
  out << "modes\t" << result.modes.size() << '\n';
  out << "pruned\t" << result.pruned << '\n';
  out << "certificate_pricing\t" << format_number(result.certificate_pricing) << '\n';
  out << "tol_price\t" << format_number(result.tol_price) << '\n';
  out << "[residuals]\n";
  out << render_residuals_tsv(residual_by_metabolite(network, result));
  return out.str();
}

std::string render_result_human(const Network& network, const ColGenResult& result) {
  std::ostringstream out;
  out << (result.certified ? "Certified optimum" : "NOT certified (iteration limit)") << ": objective "
      << format_number(result.objective) << " after " << result.iterations << " iterations\n";
  out << "certificate pricing value " << format_number(result.certificate_pricing) << " (tol " << format_number(result.tol_price)
      << "), " << result.pruned << " zero-weight mode(s) dropped\n\n";
  for (std::size_t l = 0; l < result.modes.size(); ++l) {
    char head[48];
    std::snprintf(head, sizeof head, "%3zu  w = %-11.6g ", l + 1, rendered_weight(result, l));
    out << head << result.rendered[l].text << '\n';
  }
  out << "\nresidual 2-norm per external metabolite:\n";
  for (const auto& r : residual_by_metabolite(network, result)) {
    out << "  " << r.metabolite << "  " << (r.norm ? format_number(*r.norm) : std::string("(not measured)")) << '\n';
  }
  return out.str();
}

std::string render_residuals_tsv(const std::vector<MetaboliteResidual>& residuals) {
  std::ostringstream out;
  out << "metabolite\tresidual_2norm\n";
  for (const auto& r : residuals) out << r.metabolite << '\t' << (r.norm ? format_number(*r.norm) : "absent") << '\n';
  return out.str();
}

std::string render_enumeration(const Network& network, const Enumeration& enumeration) {
  const ExtendedNetwork ext(network);
  std::ostringstream out;
  out << "id\tflux\tmacroscopic_reaction\n";
  for (std::size_t l = 0; l < enumeration.modes.size(); ++l) {
    const auto& mode = enumeration.modes[l];
    const auto macro = render_macroscopic(ext, mode);
    out << l + 1 << '\t' << format_flux(network, mode.folded * macro.factor) << '\t' << macro.text << '\n';
  }
  out << "efms\t" << enumeration.modes.size() << '\n';
  out << "two_cycles\t" << enumeration.two_cycles << '\n';
  return out.str();
}

std::string RunManifest::render() const {
  std::ostringstream out;
  out << "tool_version\t" << kToolVersion << '\n';
  for (const auto& [k, v] : inputs) out << "input." << k << '\t' << v << '\n';
  for (const auto& [k, v] : config) out << "config." << k << '\t' << v << '\n';
  for (const auto& [k, v] : timings) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    out << "time." << k << '\t' << buf << '\n';
  }
  return out.str();
}

}  // namespace efmcg
