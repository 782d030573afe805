#include "efmcg/synthetic.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "efmcg/errors.hpp"
#include "efmcg/simplex.hpp"

namespace efmcg::synthetic {

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

class Builder {
 public:
  std::size_t metabolite(std::string name, MetaboliteKind kind) {
    mets_.push_back({std::move(name), kind});
    return mets_.size() - 1;
  }

  // Returns false (and adds nothing) for a stoichiometry seen before.
  bool reaction(std::map<std::size_t, int> terms, bool reversible) {
    std::erase_if(terms, [](const auto& kv) { return kv.second == 0; });
    if (terms.empty()) return false;
    auto key = std::vector<std::pair<std::size_t, int>>(terms.begin(), terms.end());
    auto neg = key;
    for (auto& [m, c] : neg) c = -c;
    if (seen_.count(key) || seen_.count(neg)) return false;
    seen_.insert(key);
    Reaction r;
    r.id = "R" + std::to_string(rxns_.size() + 1);
    r.reversible = reversible;
    for (const auto& [m, c] : terms) r.stoichiometry.push_back({m, Rational(c)});
    rxns_.push_back(std::move(r));
    extended_ += reversible ? 2 : 1;
    return true;
  }

  std::size_t extended() const { return extended_; }
  std::size_t reactions() const { return rxns_.size(); }
  Network build() { return Network(std::move(mets_), std::move(rxns_)); }

 private:
  std::vector<Metabolite> mets_;
  std::vector<Reaction> rxns_;
  std::set<std::vector<std::pair<std::size_t, int>>> seen_;
  std::size_t extended_ = 0;
};

}  // namespace

Network random_network(std::mt19937_64& rng, const RandomNetworkSpec& spec) {
  if (spec.min_extended < 4 || spec.min_extended > spec.max_extended || spec.min_internal == 0 ||
      spec.min_internal > spec.max_internal || spec.min_external < 2 || spec.min_external > spec.max_external)
    throw InputError("inconsistent random network spec");

  for (;;) {
    const std::size_t target = uniform(rng, spec.min_extended, spec.max_extended);
    // Every internal metabolite needs a producer and a consumer, so dense
    // metabolite counts only fit the larger column budgets.
    const std::size_t k_max = std::max(spec.min_internal, std::min(spec.max_internal, target - 3));
    const std::size_t k = uniform(rng, spec.min_internal, k_max);
    const std::size_t p = uniform(rng, spec.min_external, spec.max_external);

    Builder b;
    std::vector<std::size_t> in, ex;
    for (std::size_t i = 0; i < k; ++i) in.push_back(b.metabolite("M" + std::to_string(i + 1), MetaboliteKind::Internal));
    for (std::size_t i = 0; i < p; ++i) ex.push_back(b.metabolite("X" + std::to_string(i + 1), MetaboliteKind::External));

    std::vector<int> produced(k, 0), consumed(k, 0);
    bool uptake = false, secretion = false;
    auto pick_internal = [&] {
      // Prefer metabolites that still lack a producer or a consumer.
      std::vector<std::size_t> open;
      for (std::size_t i = 0; i < k; ++i)
        if (!produced[i] || !consumed[i]) open.push_back(i);
      if (!open.empty() && coin(rng, 0.7)) return open[uniform(rng, 0, open.size() - 1)];
      return uniform(rng, 0, k - 1);
    };

    std::size_t attempts = 0;
    while (b.extended() < target && attempts++ < 400) {
      const bool reversible = b.extended() + 2 <= target && coin(rng, spec.reversible_fraction);
      const std::size_t a = pick_internal(), c = pick_internal(), d = pick_internal();
      const std::size_t x = ex[uniform(rng, 0, p - 1)];
      std::map<std::size_t, int> t;
      std::vector<std::size_t> in_side, out_side;  // internal indices
      // uptake 2, secretion 2, conversion 4, by-product 2, split 1, condensation 1 (of 12)
      static constexpr int kKinds[12] = {0, 0, 1, 1, 2, 2, 2, 2, 7, 7, 5, 8};
      int kind = kKinds[uniform(rng, 0, 11)];
      if (!uptake) kind = 0;
      else if (!secretion) kind = 1;
      switch (kind) {
        case 0:  // uptake
          t = {{x, -1}, {in[a], 1}};
          out_side = {a};
          break;
        case 1:  // secretion
          t = {{in[a], -1}, {x, 1}};
          in_side = {a};
          break;
        case 2:  // conversion
          if (a == c) continue;
          t = {{in[a], -1}, {in[c], coin(rng, 0.2) ? 2 : 1}};
          in_side = {a};
          out_side = {c};
          break;
        case 5:  // split
          if (a == c || c == d || a == d) continue;
          t = {{in[a], -1}, {in[c], 1}, {in[d], 1}};
          in_side = {a};
          out_side = {c, d};
          break;
        case 7:  // conversion with an external by-product or co-substrate
          if (a == c) continue;
          t = {{in[a], -1}, {in[c], 1}, {x, coin(rng, 0.5) ? 1 : -1}};
          in_side = {a};
          out_side = {c};
          break;
        default:  // condensation
          if (a == c || c == d || a == d) continue;
          t = {{in[a], -1}, {in[c], -1}, {in[d], 1}};
          in_side = {a, c};
          out_side = {d};
          break;
      }
      if (!b.reaction(std::move(t), reversible)) continue;
      for (std::size_t i : in_side) {
        ++consumed[i];
        if (reversible) ++produced[i];
      }
      for (std::size_t i : out_side) {
        ++produced[i];
        if (reversible) ++consumed[i];
      }
      if (kind == 0) uptake = true;
      if (kind == 1) secretion = true;
      if (reversible && (kind == 0 || kind == 1)) uptake = secretion = true;
    }
    if (b.extended() != target) continue;
    bool balanced = true;
    for (std::size_t i = 0; i < k; ++i) balanced = balanced && produced[i] && consumed[i];
    if (!balanced) continue;
    return b.build();
  }
}

MeasurementSet random_measurements(std::mt19937_64& rng, const Network& network, std::size_t min_reps,
                                   std::size_t max_reps, double missing) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MeasurementSet ms;
  const std::size_t reps = uniform(rng, min_reps, max_reps);
  for (std::size_t k = 0; k < reps; ++k) ms.repetitions.push_back("rep" + std::to_string(k + 1));
  for (std::size_t r = 0; r < network.external_count(); ++r) {
    ms.metabolites.push_back(network.external_name(r));
    const double base = normal(rng);
    std::vector<std::optional<double>> row;
    for (std::size_t k = 0; k < reps; ++k) {
      if (coin(rng, missing)) row.push_back(std::nullopt);
      else row.push_back(base + 0.1 * normal(rng));
    }
    ms.values.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < reps; ++k) {
    bool any = false;
    for (const auto& row : ms.values) any = any || row[k].has_value();
    if (!any) ms.values[uniform(rng, 0, ms.values.size() - 1)][k] = normal(rng);
  }
  return ms;
}

Network scale_network(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  constexpr std::size_t kInternal = 70, kExternal = 24, kReversible = 29, kUptakes = 6;
  Builder b;
  std::vector<std::size_t> in, ex;
  for (std::size_t i = 0; i < kInternal; ++i) in.push_back(b.metabolite("m" + std::to_string(i + 1), MetaboliteKind::Internal));
  for (std::size_t i = 0; i < kExternal; ++i) ex.push_back(b.metabolite("x" + std::to_string(i + 1), MetaboliteKind::External));

  struct Pending {
    std::map<std::size_t, int> terms;
  };
  std::vector<Pending> pending;
  std::vector<int> children(kInternal, 0);
  // Shallow random tree: each metabolite made from a recent predecessor.
  for (std::size_t i = 1; i < kInternal; ++i) {
    const std::size_t parent = uniform(rng, i > 6 ? i - 6 : 0, i - 1);
    ++children[parent];
    if (coin(rng, 0.15) && i >= 2) {
      std::size_t other = uniform(rng, 0, i - 1);
      if (other == parent) other = (parent + 1) % i;
      pending.push_back({{{in[parent], -1}, {in[other], -1}, {in[i], 1}}});
    } else {
      pending.push_back({{{in[parent], -1}, {in[i], 1}}});
    }
  }
  std::vector<std::size_t> leaves;
  for (std::size_t i = 0; i < kInternal; ++i)
    if (children[i] == 0) leaves.push_back(i);
  std::shuffle(leaves.begin(), leaves.end(), rng);

  // Uptakes feed the early metabolites, secretions drain leaves.
  for (std::size_t j = 0; j < kUptakes; ++j) pending.push_back({{{ex[j], -1}, {in[uniform(rng, 0, 9)], 1}}});
  std::size_t leaf = 0;
  for (std::size_t j = kUptakes; j < kExternal; ++j) {
    const std::size_t m = leaf < leaves.size() ? leaves[leaf++] : uniform(rng, 10, kInternal - 1);
    pending.push_back({{{in[m], -1}, {ex[j], 1}}});
  }
  // Remaining leaves loop back into the tree.
  for (; leaf < leaves.size(); ++leaf) pending.push_back({{{in[leaves[leaf]], -1}, {in[uniform(rng, 0, leaves[leaf] - 1)], 1}}});

  std::vector<std::size_t> idx(pending.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<bool> reversible(pending.size(), false);
  for (std::size_t i = 0; i < std::min(kReversible, idx.size()); ++i) reversible[idx[i]] = true;
  for (std::size_t i = 0; i < pending.size(); ++i) b.reaction(pending[i].terms, reversible[i]);
  return b.build();
}

MeasurementSet consistent_measurements(std::mt19937_64& rng, const Network& network, std::size_t repetitions,
                                       double noise, std::size_t sources) {
  const ExtendedNetwork ext(network);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  SubproblemLP lp;
  lp.equality = ext.internal();

  // A few vertices of the normalized cone under random costs.
  std::vector<Eigen::VectorXd> rays;
  for (std::size_t attempt = 0; attempt < 10 * sources && rays.size() < sources; ++attempt) {
    lp.cost = Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(ext.size()), [&] { return normal(rng); });
    const VertexSolution v = solve_subproblem(lp);
    if (v.e.sum() > 0.5) rays.push_back(v.e);
  }

  MeasurementSet ms;
  for (std::size_t k = 0; k < repetitions; ++k) ms.repetitions.push_back("rep" + std::to_string(k + 1));
  ms.metabolites.resize(network.external_count());
  ms.values.assign(network.external_count(), {});
  for (std::size_t r = 0; r < network.external_count(); ++r) ms.metabolites[r] = network.external_name(r);
  for (std::size_t k = 0; k < repetitions; ++k) {
    Eigen::VectorXd flux = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ext.size()));
    for (const auto& e : rays) flux += weight(rng) * e;
    const Eigen::VectorXd q = ext.external() * flux;
    const double scale = std::max(1.0, q.lpNorm<Eigen::Infinity>());
    for (std::size_t r = 0; r < network.external_count(); ++r)
      ms.values[r].push_back(q(static_cast<Eigen::Index>(r)) + noise * scale * normal(rng));
  }
  return ms;
}

}  // namespace efmcg::synthetic
