#include "efmcg/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "efmcg/errors.hpp"

namespace efmcg {

Network::Network(std::vector<Metabolite> metabolites, std::vector<Reaction> reactions)
    : metabolites_(std::move(metabolites)), reactions_(std::move(reactions)) {
  row_of_.resize(metabolites_.size());
  for (std::size_t i = 0; i < metabolites_.size(); ++i) {
    const auto& m = metabolites_[i];
    if (m.name.empty()) throw InputError("metabolite with empty name");
    if (!metabolite_index_.emplace(m.name, i).second) throw InputError("duplicate metabolite " + m.name);
    auto& rows = m.kind == MetaboliteKind::Internal ? internal_ : external_;
    row_of_[i] = rows.size();
    rows.push_back(i);
  }
  if (internal_.empty()) throw InputError("network has no internal metabolite");
  if (external_.empty()) throw InputError("network has no external metabolite");
  if (reactions_.empty()) throw InputError("network has no reactions");

  for (std::size_t j = 0; j < reactions_.size(); ++j) {
    auto& r = reactions_[j];
    if (r.id.empty()) throw InputError("reaction with empty id");
    if (!reaction_index_.emplace(r.id, j).second) throw InputError("duplicate reaction " + r.id);
    std::map<std::size_t, Rational> merged;
    for (const auto& t : r.stoichiometry) {
      if (t.metabolite >= metabolites_.size())
        throw InputError("reaction " + r.id + " references an unknown metabolite index");
      merged[t.metabolite] += t.coefficient;
    }
    r.stoichiometry.clear();
    for (auto& [met, coef] : merged)
      if (sgn(coef) != 0) r.stoichiometry.push_back({met, coef});
    if (r.stoichiometry.empty()) throw InputError("reaction " + r.id + " has no nonzero coefficient");
  }

  a_internal_ = RationalMatrix(internal_.size(), reactions_.size());
  a_external_ = RationalMatrix(external_.size(), reactions_.size());
  for (std::size_t j = 0; j < reactions_.size(); ++j) {
    for (const auto& t : reactions_[j].stoichiometry) {
      auto& target = metabolites_[t.metabolite].kind == MetaboliteKind::Internal ? a_internal_ : a_external_;
      target(row_of_[t.metabolite], j) = t.coefficient;
    }
  }
}

std::optional<std::size_t> Network::find_metabolite(std::string_view name) const {
  auto it = metabolite_index_.find(std::string(name));
  if (it == metabolite_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Network::find_reaction(std::string_view id) const {
  auto it = reaction_index_.find(std::string(id));
  if (it == reaction_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Network::external_row(std::string_view name) const {
  auto idx = find_metabolite(name);
  if (!idx || metabolites_[*idx].kind != MetaboliteKind::External) return std::nullopt;
  return row_of_[*idx];
}

std::vector<std::size_t> Network::irreversible_reactions() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < reactions_.size(); ++j)
    if (!reactions_[j].reversible) out.push_back(j);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct SourceLine {
  std::size_t number;
  std::string_view text;  // comment stripped, trimmed
};

std::vector<SourceLine> source_lines(std::string_view text) {
  std::vector<SourceLine> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view line = text.substr(pos, end - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) out.push_back({number, line});
    pos = end + 1;
  }
  return out;
}

bool starts_with_keyword(std::string_view line, std::string_view keyword, std::string_view& rest) {
  if (line.substr(0, keyword.size()) != keyword) return false;
  auto after = trim(line.substr(keyword.size()));
  if (after.empty() || after.front() != ':') return false;
  rest = after.substr(1);
  return true;
}

struct ParsedTerm {
  std::string name;
  Rational coefficient;
};

std::vector<ParsedTerm> parse_side(std::string_view side, std::size_t line) {
  std::vector<ParsedTerm> terms;
  const auto tokens = split_ws(side);
  std::size_t i = 0;
  while (i < tokens.size()) {
    Rational coef(1);
    if (i + 1 < tokens.size() && tokens[i + 1] != "+") {
      auto q = parse_rational(tokens[i]);
      if (!q) throw ParseError(line, "expected coefficient, got '" + tokens[i] + "'");
      if (sgn(*q) <= 0) throw ParseError(line, "coefficient must be positive: " + tokens[i]);
      coef = *q;
      ++i;
    }
    if (tokens[i] == "+") throw ParseError(line, "expected metabolite name before '+'");
    terms.push_back({tokens[i], coef});
    ++i;
    if (i < tokens.size()) {
      if (tokens[i] != "+") throw ParseError(line, "expected '+' between terms, got '" + tokens[i] + "'");
      ++i;
      if (i == tokens.size()) throw ParseError(line, "dangling '+'");
    }
  }
  return terms;
}

struct ParsedReaction {
  std::size_t line;
  std::string id;
  std::vector<ParsedTerm> lhs;
  std::vector<ParsedTerm> rhs;
  bool reversible;
};

ParsedReaction parse_reaction_line(const SourceLine& src) {
  const auto colon = src.text.find(':');
  if (colon == std::string_view::npos) throw ParseError(src.number, "expected 'ID : equation'");
  ParsedReaction r;
  r.line = src.number;
  r.id = std::string(trim(src.text.substr(0, colon)));
  if (r.id.empty() || r.id.find_first_of(" \t") != std::string::npos)
    throw ParseError(src.number, "invalid reaction id '" + r.id + "'");
  std::string_view eq = src.text.substr(colon + 1);
  std::size_t arrow = eq.find("<->");
  std::size_t arrow_len = 3;
  r.reversible = arrow != std::string_view::npos;
  if (!r.reversible) {
    arrow = eq.find("->");
    arrow_len = 2;
  }
  if (arrow == std::string_view::npos) throw ParseError(src.number, "missing '->' or '<->'");
  std::string_view rest = eq.substr(arrow + arrow_len);
  if (rest.find("->") != std::string_view::npos) throw ParseError(src.number, "more than one arrow");
  r.lhs = parse_side(eq.substr(0, arrow), src.number);
  r.rhs = parse_side(rest, src.number);
  if (r.lhs.empty() && r.rhs.empty()) throw ParseError(src.number, "reaction " + r.id + " is empty");
  return r;
}

}  // namespace

Network parse_network(std::string_view text) {
  const auto lines = source_lines(text);

  // Declarations first, so they may appear anywhere in the file.
  std::unordered_map<std::string, MetaboliteKind> declared;
  bool strict = false;
  for (const auto& src : lines) {
    std::string_view rest;
    MetaboliteKind kind;
    if (starts_with_keyword(src.text, "external", rest)) {
      kind = MetaboliteKind::External;
    } else if (starts_with_keyword(src.text, "internal", rest)) {
      kind = MetaboliteKind::Internal;
      strict = true;
    } else {
      continue;
    }
    const auto names = split_ws(rest);
    if (names.empty()) throw ParseError(src.number, "empty declaration");
    for (const auto& name : names)
      if (!declared.emplace(name, kind).second) throw ParseError(src.number, "duplicate metabolite " + name);
  }

  std::vector<Metabolite> metabolites;
  std::unordered_map<std::string, std::size_t> index;
  auto intern = [&](const std::string& name, std::size_t line) -> std::size_t {
    if (auto it = index.find(name); it != index.end()) return it->second;
    auto d = declared.find(name);
    if (d == declared.end() && strict) throw ParseError(line, "undeclared metabolite " + name);
    const auto kind = d == declared.end() ? MetaboliteKind::Internal : d->second;
    index.emplace(name, metabolites.size());
    metabolites.push_back({name, kind});
    return metabolites.size() - 1;
  };

  std::vector<Reaction> reactions;
  std::unordered_set<std::string> reaction_ids;
  for (const auto& src : lines) {
    std::string_view rest;
    if (starts_with_keyword(src.text, "external", rest) || starts_with_keyword(src.text, "internal", rest)) {
      for (const auto& name : split_ws(rest)) intern(name, src.number);
      continue;
    }
    auto parsed = parse_reaction_line(src);
    if (!reaction_ids.insert(parsed.id).second) throw ParseError(src.number, "duplicate reaction " + parsed.id);
    Reaction r;
    r.id = parsed.id;
    r.reversible = parsed.reversible;
    for (const auto& t : parsed.lhs) r.stoichiometry.push_back({intern(t.name, src.number), Rational(-t.coefficient)});
    for (const auto& t : parsed.rhs) r.stoichiometry.push_back({intern(t.name, src.number), t.coefficient});
    std::map<std::size_t, Rational> merged;
    for (const auto& t : r.stoichiometry) merged[t.metabolite] += t.coefficient;
    bool any = std::any_of(merged.begin(), merged.end(), [](const auto& kv) { return sgn(kv.second) != 0; });
    if (!any) throw ParseError(src.number, "reaction " + r.id + " has no nonzero coefficient");
    reactions.push_back(std::move(r));
  }

  return Network(std::move(metabolites), std::move(reactions));
}

Network read_network_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read network file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_network(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path.string());
  }
}

Partition partition(const Network& network) {
  return {network.internal_stoichiometry().to_double(), network.external_stoichiometry().to_double()};
}

// ---------------------------------------------------------------------------
// Extended space

ExtendedNetwork::ExtendedNetwork(const Network& base) : base_(&base) {
  const auto& reactions = base.reactions();
  for (std::size_t j = 0; j < reactions.size(); ++j) columns_.push_back({j, Direction::Forward});
  for (std::size_t j = 0; j < reactions.size(); ++j)
    if (reactions[j].reversible) columns_.push_back({j, Direction::Backward});

  partner_.assign(columns_.size(), std::nullopt);
  for (std::size_t k = reactions.size(); k < columns_.size(); ++k) {
    partner_[k] = columns_[k].reaction;
    partner_[columns_[k].reaction] = k;
  }

  const auto& ai = base.internal_stoichiometry();
  const auto& ax = base.external_stoichiometry();
  a_internal_exact_ = RationalMatrix(ai.rows(), columns_.size());
  a_external_exact_ = RationalMatrix(ax.rows(), columns_.size());
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    const auto [j, dir] = columns_[k];
    for (std::size_t r = 0; r < ai.rows(); ++r)
      a_internal_exact_(r, k) = dir == Direction::Forward ? ai(r, j) : Rational(-ai(r, j));
    for (std::size_t r = 0; r < ax.rows(); ++r)
      a_external_exact_(r, k) = dir == Direction::Forward ? ax(r, j) : Rational(-ax(r, j));
  }
  a_internal_ = a_internal_exact_.to_double();
  a_external_ = a_external_exact_.to_double();
}

std::optional<std::size_t> ExtendedNetwork::partner(std::size_t column) const { return partner_.at(column); }

ExtendedNetwork extend_reversible(const Network& network) { return ExtendedNetwork(network); }

bool FluxMode::internal_only(double tol) const { return macro.size() == 0 || macro.lpNorm<Eigen::Infinity>() <= tol; }

namespace {

std::vector<std::size_t> two_cycle_reactions(const ExtendedNetwork& ext, const Eigen::VectorXd& ray, double tol) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < ext.size(); ++k) {
    if (ext.columns()[k].direction != Direction::Backward) continue;
    const auto fwd = *ext.partner(k);
    if (ray(fwd) > tol && ray(k) > tol) out.push_back(ext.columns()[k].reaction);
  }
  return out;
}

}  // namespace

FoldResult fold_ray(const ExtendedNetwork& ext, const Eigen::VectorXd& ray, double tol_feas) {
  if (static_cast<std::size_t>(ray.size()) != ext.size())
    throw FeasibilityError("ray has " + std::to_string(ray.size()) + " entries, expected " + std::to_string(ext.size()));
  if (ray.size() > 0 && ray.minCoeff() < -tol_feas) throw FeasibilityError("ray has a negative component");
  const double violation = ext.internal().rows() > 0 ? (ext.internal() * ray).lpNorm<Eigen::Infinity>() : 0.0;
  if (violation > tol_feas)
    throw FeasibilityError("ray violates internal balance (max residual " + std::to_string(violation) + ")");

  const std::size_t nr = ext.base().reaction_count();
  Eigen::VectorXd folded = Eigen::VectorXd::Zero(nr);
  for (std::size_t k = 0; k < ext.size(); ++k) {
    const auto& col = ext.columns()[k];
    folded(col.reaction) += col.direction == Direction::Forward ? ray(k) : -ray(k);
  }
  if (folded.lpNorm<Eigen::Infinity>() <= tol_feas) return Cycle{two_cycle_reactions(ext, ray, tol_feas)};

  FluxMode mode;
  mode.extended = ray;
  mode.folded = folded;
  mode.macro = partition(ext.base()).external * folded;
  mode.normalization = ray.sum();
  return mode;
}

FoldResult fold_ray_exact(const ExtendedNetwork& ext, const std::vector<Rational>& ray) {
  if (ray.size() != ext.size()) throw FeasibilityError("ray size mismatch");
  for (const auto& v : ray)
    if (sgn(v) < 0) throw FeasibilityError("ray has a negative component");
  const auto& ai = ext.internal_exact();
  for (std::size_t r = 0; r < ai.rows(); ++r) {
    Rational acc(0);
    for (std::size_t k = 0; k < ext.size(); ++k) acc += ai(r, k) * ray[k];
    if (sgn(acc) != 0) throw FeasibilityError("ray violates internal balance");
  }
  Rational total(0);
  for (const auto& v : ray) total += v;
  if (sgn(total) == 0) throw FeasibilityError("zero ray");

  const std::size_t nr = ext.base().reaction_count();
  std::vector<Rational> folded(nr, Rational(0));
  for (std::size_t k = 0; k < ext.size(); ++k) {
    const auto& col = ext.columns()[k];
    if (col.direction == Direction::Forward)
      folded[col.reaction] += ray[k];
    else
      folded[col.reaction] -= ray[k];
  }
  Eigen::VectorXd ray_d(ext.size());
  for (std::size_t k = 0; k < ext.size(); ++k) ray_d(k) = Rational(ray[k] / total).get_d();
  if (std::all_of(folded.begin(), folded.end(), [](const Rational& v) { return sgn(v) == 0; }))
    return Cycle{two_cycle_reactions(ext, ray_d, 0.0)};

  FluxMode mode;
  mode.extended = ray_d;
  mode.folded = Eigen::VectorXd(nr);
  for (std::size_t j = 0; j < nr; ++j) mode.folded(j) = Rational(folded[j] / total).get_d();
  mode.macro = partition(ext.base()).external * mode.folded;
  mode.normalization = 1.0;
  std::vector<Rational> scaled(ray.size());
  for (std::size_t k = 0; k < ray.size(); ++k) scaled[k] = ray[k] / total;
  mode.exact_extended = std::move(scaled);
  return mode;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

int sgn(double v) { return (v > 0) - (v < 0); }

std::string format_decimal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

bool terminating_decimal(Integer den) {
  while (den % 2 == 0) den /= 2;
  while (den % 5 == 0) den /= 5;
  return den == 1;
}

// Decimal when the value has a terminating expansion, "p/q" for small
// denominators (up to 100) otherwise: thirds, sevenths, 19/30.
std::string format_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  if (terminating_decimal(q.get_den())) return format_decimal(q.get_d());
  if (q.get_den() <= 100) return to_string(q);
  return format_decimal(q.get_d());
}

}  // namespace

std::string format_coefficient(double value) {
  if (auto q = recognize_rational(value, 1000, 1e-11)) return format_rational(*q);
  return format_decimal(value);
}

namespace {

template <typename Coef, typename Format>
std::string render_sides(const Network& net, const std::vector<Coef>& coefficients, Format fmt) {
  std::string lhs, rhs;
  for (std::size_t r = 0; r < coefficients.size(); ++r) {
    const int s = sgn(coefficients[r]);
    if (s == 0) continue;
    std::string& side = s < 0 ? lhs : rhs;
    if (!side.empty()) side += " + ";
    side += fmt(s < 0 ? Coef(-coefficients[r]) : coefficients[r]) + " " + net.external_name(r);
  }
  if (lhs.empty()) lhs = "∅";
  if (rhs.empty()) rhs = "∅";
  return lhs + " ⇒ " + rhs;
}

}  // namespace

MacroReaction render_macroscopic(const ExtendedNetwork& ext, const FluxMode& mode) {
  const Network& net = ext.base();
  MacroReaction out;
  const std::size_t nx = net.external_count();

  if (mode.exact_extended) {
    const auto& ax = ext.external_exact();
    std::vector<Rational> macro(nx, Rational(0));
    for (std::size_t r = 0; r < nx; ++r)
      for (std::size_t k = 0; k < ext.size(); ++k) macro[r] += ax(r, k) * (*mode.exact_extended)[k];
    Rational largest(0);
    for (const auto& v : macro) largest = std::max(largest, Rational(abs(v)));
    if (sgn(largest) == 0) {
      out.text = std::string(kInternalCycleMarker);
      out.coefficients = Eigen::VectorXd::Zero(nx);
      out.internal_only = true;
      out.exact_factor = Rational(1);
      out.exact_coefficients = macro;
      return out;
    }
    Rational factor = 1 / largest;
    std::vector<Rational> scaled(nx);
    out.coefficients.resize(nx);
    for (std::size_t r = 0; r < nx; ++r) {
      scaled[r] = macro[r] * factor;
      out.coefficients(r) = scaled[r].get_d();
    }
    out.text = render_sides(net, scaled, [](const Rational& q) { return format_rational(q); });
    out.factor = factor.get_d();
    out.exact_factor = factor;
    out.exact_coefficients = std::move(scaled);
    return out;
  }

  const double largest = mode.macro.size() ? mode.macro.lpNorm<Eigen::Infinity>() : 0.0;
  if (largest <= kDefaultTolFeas) {
    out.text = std::string(kInternalCycleMarker);
    out.coefficients = Eigen::VectorXd::Zero(nx);
    out.internal_only = true;
    return out;
  }
  out.factor = 1.0 / largest;
  out.coefficients = mode.macro * out.factor;
  std::vector<double> coefs(nx);
  for (std::size_t r = 0; r < nx; ++r) {
    // Entries below the feasibility floor are rounding noise.
    coefs[r] = std::abs(out.coefficients(r)) <= kDefaultTolFeas ? 0.0 : out.coefficients(r);
  }
  out.text = render_sides(net, coefs, [](double v) { return format_coefficient(v); });
  return out;
}

}  // namespace efmcg
