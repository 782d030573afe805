#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "efmcg/network.hpp"

namespace efmcg {

// Per-repetition external flux measurements. values[m][k] is metabolite m
// in repetition k; nullopt marks a missing cell.
struct MeasurementSet {
  std::vector<std::string> metabolites;
  std::vector<std::string> repetitions;
  std::vector<std::vector<std::optional<double>>> values;

  std::size_t missing_count() const;
  std::optional<double> value(std::string_view metabolite, std::string_view repetition) const;
};

struct StackedRow {
  std::size_t repetition;
  std::size_t external_row;  // row of A_x
};

// Measurements of all repetitions stacked into one vector, with the
// matching rows of A_x. Missing cells have no row.
struct StackedSystem {
  Eigen::VectorXd q;
  std::vector<StackedRow> rows;
  // Per repetition, the A_x rows present in that repetition's block.
  std::vector<std::vector<std::size_t>> blocks;
  std::size_t repetition_count = 0;

  // Rows of the stacked design S * A applied to an arbitrary A with one row
  // per external metabolite.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& per_external) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& per_external) const;
};

// Table with a header row of repetition ids (optional when the first cell
// already names an external metabolite). Cells are tab-, comma- or
// whitespace-separated; "Na" (any case) is missing.
MeasurementSet parse_measurements(std::string_view text, const Network& network);
MeasurementSet read_measurement_file(const std::filesystem::path& path, const Network& network);

// Canonical writer: tab-separated, header "metabolite" + repetition ids,
// values printed with round-trip precision.
std::string render_measurements(const MeasurementSet& ms);

// Throws InputError for metabolites that are not external in the network,
// or when every cell is missing.
StackedSystem stack(const MeasurementSet& ms, const Network& network);

}  // namespace efmcg
