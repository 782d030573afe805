#include "efmcg/colgen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "efmcg/errors.hpp"
#include "efmcg/oracle.hpp"

namespace efmcg {

void EngineConfig::validate() const {
  if (tol_price && !(*tol_price > 0)) throw InputError("tol_price must be positive");
  if (!(tol_feas > 0) || !(tol_kkt > 0) || !(tol_act > 0)) throw InputError("tolerances must be positive");
  if (max_iterations == 0) throw InputError("max_iterations must be at least 1");
}

double EngineConfig::price_threshold(const Eigen::VectorXd& q) const {
  if (tol_price) return *tol_price;
  return 1e-8 * (1.0 + (q.size() ? q.lpNorm<Eigen::Infinity>() : 0.0));
}

double relative_gap(double a, double b, double scale) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-8 * (1.0 + std::abs(scale))});
  return std::abs(a - b) / denom;
}

namespace {

class Engine {
 public:
  Engine(const Network& network, const MeasurementSet& ms, const EngineConfig& cfg)
      : ext_(network), cfg_(cfg), sys_(stack(ms, network)) {
    cfg_.validate();
    design_ = sys_.apply(ext_.external());
    lp_.equality = ext_.internal();
    tol_price_ = cfg_.price_threshold(sys_.q);
  }

  ColGenResult run() {
    ColGenResult result;
    result.tol_price = tol_price_;

    MasterProblem mp;
    mp.q = sys_.q;
    mp.columns.resize(sys_.q.size(), 0);
    NnlsOptions nnls;
    nnls.tol_kkt = cfg_.tol_kkt;
    MasterSolution master = solve_master(mp, nullptr, nnls);

    std::optional<std::vector<std::size_t>> basis;
    std::vector<Eigen::VectorXd> normalized;  // |.|_1 = 1 copies for duplicate detection
    bool certified = false;
    double last_price = 0.0;

    auto price = [&](TraceEntry& entry) {
      lp_.cost = compute_pricing(design_, master, cfg_.backend);
      const bool warm = cfg_.warm_start_subproblem && basis.has_value();
      VertexSolution v = solve_subproblem(lp_, simplex_options(), warm ? &*basis : nullptr);
      basis = v.basis;
      entry.pricing_value = v.objective;
      entry.simplex_pivots = v.pivots;
      last_price = v.objective;
      return v;
    };

    for (std::size_t it = 1; it <= cfg_.max_iterations; ++it) {
      TraceEntry entry;
      entry.iteration = it;
      entry.objective_before = master.residual.norm();
      VertexSolution vertex = price(entry);
      result.iterations = it;
      if (vertex.objective >= -tol_price_) {
        entry.objective_after = entry.objective_before;
        result.trace.push_back(entry);
        certified = true;
        break;
      }

      auto folded = fold_ray(ext_, vertex.e, cfg_.tol_feas);
      if (std::holds_alternative<Cycle>(folded))
        throw NumericalError("subproblem returned a split-reaction cycle with negative price");
      FluxMode mode = std::get<FluxMode>(std::move(folded));
      if (mode.internal_only(cfg_.tol_feas))
        throw NumericalError("subproblem returned a mode without external stoichiometry with negative price");

      Eigen::VectorXd unit = mode.extended / mode.extended.sum();
      for (std::size_t l = 0; l < normalized.size(); ++l) {
        if ((normalized[l] - unit).lpNorm<Eigen::Infinity>() <= 1e-7) {
          std::ostringstream msg;
          msg << "iteration " << it << ": priced column duplicates mode " << l + 1 << " (pricing value "
              << vertex.objective << ", tol_price " << tol_price_ << ")";
          throw StallError(msg.str());
        }
      }
      entry.ray = verify_extreme_ray(ext_, mode.extended, cfg_.tol_act, cfg_.tol_feas);

      if (cfg_.mode_scale) {
        const double s = cfg_.mode_scale(mode);
        if (!(s > 0) || !std::isfinite(s)) throw InputError("mode_scale must return a positive finite factor");
        mode.extended *= s;
        mode.folded *= s;
        mode.macro *= s;
        mode.normalization *= s;
        mode.exact_extended.reset();
      }

      const Eigen::VectorXd column = design_ * mode.extended;
      const double scaled_price = vertex.objective * (mode.normalization / vertex.e.sum());
      entry.decrease_bound = column.squaredNorm() > 0 ? scaled_price * scaled_price / (2.0 * column.squaredNorm()) : 0.0;

      mp.columns.conservativeResize(Eigen::NoChange, mp.columns.cols() + 1);
      mp.columns.col(mp.columns.cols() - 1) = column;
      const double before = master.objective;
      master = solve_master(mp, &master, nnls);
      const double decrease = before - master.objective;
      entry.degenerate = decrease < entry.decrease_bound * (1.0 - 1e-6) - 1e-14 * (1.0 + before);

      normalized.push_back(std::move(unit));
      result.found.push_back(mode);
      entry.mode_added = result.found.size() - 1;
      entry.objective_after = master.residual.norm();
      result.trace.push_back(entry);
    }

    if (!certified && !result.trace.empty() && result.trace.back().mode_added) {
      // Out of iterations: one more pricing round for an honest certificate value.
      TraceEntry entry;
      entry.iteration = result.iterations + 1;
      entry.objective_before = entry.objective_after = master.residual.norm();
      price(entry);
      certified = false;
      result.trace.push_back(entry);
    }

    result.certified = certified;
    result.certificate_pricing = last_price;
    result.residual = master.residual;
    result.objective = master.residual.norm();

    std::vector<std::size_t> kept;
    for (std::size_t l = 0; l < result.found.size(); ++l)
      if (cfg_.keep_zero_weight_modes || master.w(static_cast<Eigen::Index>(l)) > 0.0) kept.push_back(l);
    result.pruned = result.found.size() - kept.size();
    result.weights.resize(static_cast<Eigen::Index>(kept.size()));
    result.certificate_multipliers.resize(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const auto l = static_cast<Eigen::Index>(kept[i]);
      result.modes.push_back(result.found[kept[i]]);
      result.weights(static_cast<Eigen::Index>(i)) = master.w(l);
      result.certificate_multipliers(static_cast<Eigen::Index>(i)) = master.multipliers(l);
      result.rendered.push_back(render_macroscopic(ext_, result.found[kept[i]]));
    }
    result.stacked = sys_;
    return result;
  }

 private:
  SimplexOptions simplex_options() const {
    SimplexOptions o;
    o.tol_act = cfg_.tol_act;
    return o;
  }

  ExtendedNetwork ext_;
  EngineConfig cfg_;
  StackedSystem sys_;
  Eigen::MatrixXd design_;
  SubproblemLP lp_;
  double tol_price_ = 0.0;
};

}  // namespace

ColGenResult run(const Network& network, const MeasurementSet& ms, const EngineConfig& config) {
  Engine engine(network, ms, config);
  return engine.run();
}

CertificateReport check_certificate(const Network& network, const MeasurementSet& ms, const ColGenResult& result,
                                    const std::vector<FluxMode>* oracle_modes, const EngineConfig& config) {
  CertificateReport report;
  if (!result.certified) {
    report.refused = true;
    report.violations.push_back("result is not certified (iteration limit reached)");
    return report;
  }
  const ExtendedNetwork ext(network);
  const StackedSystem sys = stack(ms, network);
  const Eigen::MatrixXd design = sys.apply(ext.external());
  const double tol_price = config.tol_price ? *config.tol_price : result.tol_price;

  Eigen::VectorXd residual = -sys.q;
  Eigen::MatrixXd columns(sys.q.size(), static_cast<Eigen::Index>(result.modes.size()));
  for (std::size_t l = 0; l < result.modes.size(); ++l)
    columns.col(static_cast<Eigen::Index>(l)) = design * result.modes[l].extended;
  if (!result.modes.empty()) residual += columns * result.weights;
  const Eigen::VectorXd lambda = columns.transpose() * residual;
  const Eigen::VectorXd& w = result.weights;

  auto fail = [&](const std::string& what) { report.violations.push_back(what); };
  for (Eigen::Index l = 0; l < w.size(); ++l) {
    if (w(l) < 0) fail("weight of mode " + std::to_string(l + 1) + " is negative");
    report.max_multiplier_violation = std::max(report.max_multiplier_violation, -lambda(l));
  }
  if (report.max_multiplier_violation > config.tol_kkt) {
    std::ostringstream msg;
    msg << "KKT violation: multiplier " << -report.max_multiplier_violation << " below -" << config.tol_kkt;
    fail(msg.str());
  }
  report.complementarity = w.size() ? std::abs(lambda.dot(w)) : 0.0;
  const double w_norm = w.size() ? w.norm() : 0.0;
  if (report.complementarity > config.tol_kkt * (1.0 + w_norm)) {
    std::ostringstream msg;
    msg << "KKT violation: |lambda^T w| = " << report.complementarity << " exceeds " << config.tol_kkt * (1.0 + w_norm);
    fail(msg.str());
  }
  if (result.certificate_pricing < -tol_price) fail("final pricing value below -tol_price");
  if (std::abs(residual.norm() - result.objective) > 1e-9 * (1.0 + result.objective))
    fail("stored objective does not match the recomputed residual");

  if (oracle_modes) {
    const Eigen::VectorXd c = design.transpose() * residual;
    double min_price = 0.0;
    for (std::size_t l = 0; l < oracle_modes->size(); ++l) {
      const auto& e = (*oracle_modes)[l].extended;
      const double value = c.dot(e) / e.sum();
      if (value < min_price) {
        min_price = value;
        if (value < -tol_price) report.violating_oracle_mode = l;
      }
    }
    report.oracle_min_pricing = min_price;
    if (report.violating_oracle_mode) {
      std::ostringstream msg;
      msg << "oracle EFM " << *report.violating_oracle_mode + 1 << " prices at " << min_price << " < -" << tol_price;
      fail(msg.str());
    }

    MasterProblem full;
    full.q = sys.q;
    full.columns.resize(sys.q.size(), static_cast<Eigen::Index>(oracle_modes->size()));
    for (std::size_t l = 0; l < oracle_modes->size(); ++l)
      full.columns.col(static_cast<Eigen::Index>(l)) = design * (*oracle_modes)[l].extended;
    const double oracle_objective = solve_master(full).residual.norm();
    report.oracle_objective = oracle_objective;
    report.relative_gap = relative_gap(result.objective, oracle_objective, sys.q.norm());
    if (*report.relative_gap > 1e-6) {
      std::ostringstream msg;
      msg << "objective " << result.objective << " differs from full-enumeration objective " << oracle_objective
          << " (relative gap " << *report.relative_gap << ")";
      fail(msg.str());
    }
  }
  report.passed = report.violations.empty();
  return report;
}

std::vector<MetaboliteResidual> residual_by_metabolite(const Network& network, const ColGenResult& result) {
  std::vector<MetaboliteResidual> out;
  for (std::size_t r = 0; r < network.external_count(); ++r) {
    double sum = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < result.stacked.rows.size(); ++i) {
      if (result.stacked.rows[i].external_row != r) continue;
      any = true;
      sum += result.residual(static_cast<Eigen::Index>(i)) * result.residual(static_cast<Eigen::Index>(i));
    }
    out.push_back({network.external_name(r), any ? std::optional<double>(std::sqrt(sum)) : std::nullopt});
  }
  return out;
}

}  // namespace efmcg
