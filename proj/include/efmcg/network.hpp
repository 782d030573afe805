#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "efmcg/rational.hpp"

namespace efmcg {

inline constexpr double kDefaultTolFeas = 1e-9;

enum class MetaboliteKind { Internal, External };

struct Metabolite {
  std::string name;
  MetaboliteKind kind;
};

struct StoichTerm {
  std::size_t metabolite;  // index into Network::metabolites()
  Rational coefficient;    // negative = consumed
};

struct Reaction {
  std::string id;
  std::vector<StoichTerm> stoichiometry;  // sorted by metabolite index, no zeros
  bool reversible = false;
};

// Immutable metabolic network. Metabolite order is the declaration order;
// A_i and A_x keep that order restricted to each kind, columns follow the
// reaction order.
class Network {
 public:
  // Throws InputError when an invariant does not hold.
  Network(std::vector<Metabolite> metabolites, std::vector<Reaction> reactions);

  const std::vector<Metabolite>& metabolites() const noexcept { return metabolites_; }
  const std::vector<Reaction>& reactions() const noexcept { return reactions_; }

  std::size_t reaction_count() const noexcept { return reactions_.size(); }
  std::size_t internal_count() const noexcept { return internal_.size(); }
  std::size_t external_count() const noexcept { return external_.size(); }

  // Metabolite indices of the rows of A_i / A_x.
  const std::vector<std::size_t>& internal_metabolites() const noexcept { return internal_; }
  const std::vector<std::size_t>& external_metabolites() const noexcept { return external_; }

  std::optional<std::size_t> find_metabolite(std::string_view name) const;
  std::optional<std::size_t> find_reaction(std::string_view id) const;
  // Row of A_x for an external metabolite name.
  std::optional<std::size_t> external_row(std::string_view name) const;
  const std::string& external_name(std::size_t row) const { return metabolites_[external_[row]].name; }

  const RationalMatrix& internal_stoichiometry() const noexcept { return a_internal_; }
  const RationalMatrix& external_stoichiometry() const noexcept { return a_external_; }

  std::vector<std::size_t> irreversible_reactions() const;

 private:
  std::vector<Metabolite> metabolites_;
  std::vector<Reaction> reactions_;
  std::vector<std::size_t> internal_;
  std::vector<std::size_t> external_;
  std::vector<std::size_t> row_of_;  // metabolite index -> row within its kind
  std::unordered_map<std::string, std::size_t> metabolite_index_;
  std::unordered_map<std::string, std::size_t> reaction_index_;
  RationalMatrix a_internal_;
  RationalMatrix a_external_;
};

// Reads the line-oriented network format:
//   external: NAME NAME ...
//   internal: NAME ...            (optional; enables strict declarations)
//   ID : 2 A + 1/3 B -> C         (irreversible)
//   ID : A <-> B                  (reversible)
// '#' starts a comment. Throws ParseError with the offending line.
Network parse_network(std::string_view text);
Network read_network_file(const std::filesystem::path& path);

struct Partition {
  Eigen::MatrixXd internal;  // A_i
  Eigen::MatrixXd external;  // A_x
};

Partition partition(const Network& network);

enum class Direction { Forward, Backward };

struct ExtendedColumn {
  std::size_t reaction;
  Direction direction;
};

// Every reaction gets a forward column in declaration order; reversible
// reactions then receive a backward column (negated), appended in the same
// order.
class ExtendedNetwork {
 public:
  explicit ExtendedNetwork(const Network& base);

  // The base network must outlive this object.
  const Network& base() const noexcept { return *base_; }
  const std::vector<ExtendedColumn>& columns() const noexcept { return columns_; }
  std::size_t size() const noexcept { return columns_.size(); }

  const Eigen::MatrixXd& internal() const noexcept { return a_internal_; }
  const Eigen::MatrixXd& external() const noexcept { return a_external_; }
  const RationalMatrix& internal_exact() const noexcept { return a_internal_exact_; }
  const RationalMatrix& external_exact() const noexcept { return a_external_exact_; }

  // Extended column of the opposite direction, for reversible reactions.
  std::optional<std::size_t> partner(std::size_t column) const;

 private:
  const Network* base_;
  std::vector<ExtendedColumn> columns_;
  std::vector<std::optional<std::size_t>> partner_;
  Eigen::MatrixXd a_internal_;
  Eigen::MatrixXd a_external_;
  RationalMatrix a_internal_exact_;
  RationalMatrix a_external_exact_;
};

ExtendedNetwork extend_reversible(const Network& network);

// An elementary flux mode carried in both the extended and the original
// reaction space.
struct FluxMode {
  Eigen::VectorXd extended;  // >= 0, one entry per extended column
  Eigen::VectorXd folded;    // signed, one entry per base reaction
  Eigen::VectorXd macro;     // A_x * folded, one entry per external metabolite
  double normalization = 1.0;  // 1^T extended
  // Exact extended ray, present when the mode came from exact enumeration.
  std::optional<std::vector<Rational>> exact_extended;

  bool internal_only(double tol = kDefaultTolFeas) const;
};

// A ray that traverses split reversible reactions in both directions and
// folds to zero.
struct Cycle {
  std::vector<std::size_t> reactions;
};

using FoldResult = std::variant<FluxMode, Cycle>;

// Maps an extended-space ray back to the base network. Throws
// FeasibilityError if the ray is negative or violates A_i e = 0.
FoldResult fold_ray(const ExtendedNetwork& ext, const Eigen::VectorXd& ray, double tol_feas = kDefaultTolFeas);
FoldResult fold_ray_exact(const ExtendedNetwork& ext, const std::vector<Rational>& ray);

struct MacroReaction {
  std::string text;
  // Rendered (scaled) coefficient per external metabolite: factor * macro.
  Eigen::VectorXd coefficients;
  // Rendered weight is w / factor.
  double factor = 1.0;
  bool internal_only = false;
  std::optional<std::vector<Rational>> exact_coefficients;
  std::optional<Rational> exact_factor;
};

// Scales the macroscopic stoichiometry so the largest-magnitude coefficient
// is 1 and renders "a S1 + b S2 ⇒ c P1". Uses exact arithmetic when the mode
// carries an exact ray.
MacroReaction render_macroscopic(const ExtendedNetwork& ext, const FluxMode& mode);

inline constexpr std::string_view kInternalCycleMarker = "internal cycle (no external stoichiometry)";

// "0.5", "2/3", "0.028217": values within 1e-11 of a fraction with denominator
// <= 1000 print that fraction exactly (as p/q when it does not terminate
// and q <= 100).
std::string format_coefficient(double value);

}  // namespace efmcg
