// efmcg: fit external flux data with elementary flux modes found by column
// generation.
//
//   efmcg solve     --network N --data D [--out DIR] [--format tsv|human] ...
//   efmcg enumerate --network N [--max-columns K] ...
//   efmcg check     --network N --data D ...
//
// Exit codes: 0 certified optimum / check passed, 1 not certified,
// 2 input error, 3 internal error, 4 oracle limit, 5 check failed.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "efmcg/colgen.hpp"
#include "efmcg/errors.hpp"
#include "efmcg/oracle.hpp"
#include "efmcg/report.hpp"

namespace fs = std::filesystem;
using namespace efmcg;

namespace {

enum Exit { kCertified = 0, kNotCertified = 1, kInputError = 2, kInternalError = 3, kOracleLimit = 4, kCheckFailed = 5 };

struct Options {
  std::string network;
  std::string data;
  std::optional<double> tol_price;
  double tol_feas = kDefaultTolFeas;
  double tol_kkt = kDefaultTolKkt;
  std::size_t max_iter = 1000;
  bool keep_zero = false;
  std::string out;
  std::string format = "tsv";
  std::string backend = "serial";
  std::size_t max_columns = EnumerationLimits{}.max_extended_columns;
  std::size_t max_rays = EnumerationLimits{}.max_rays;
  double time_limit = 60.0;
};

class Timer {
 public:
  void lap(const std::string& phase) {
    const auto now = std::chrono::steady_clock::now();
    laps_.emplace_back(phase, std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }
  const std::vector<std::pair<std::string, double>>& laps() const { return laps_; }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  std::vector<std::pair<std::string, double>> laps_;
};

kernels::Backend backend_of(const Options& o) {
  return o.backend == "openmp" ? kernels::Backend::OpenMP : kernels::Backend::Serial;
}

EngineConfig engine_config(const Options& o) {
  EngineConfig cfg;
  cfg.tol_price = o.tol_price;
  cfg.tol_feas = o.tol_feas;
  cfg.tol_kkt = o.tol_kkt;
  cfg.max_iterations = o.max_iter;
  cfg.keep_zero_weight_modes = o.keep_zero;
  cfg.backend = backend_of(o);
  return cfg;
}

EnumerationLimits limits(const Options& o) {
  EnumerationLimits l;
  l.max_extended_columns = o.max_columns;
  l.max_rays = o.max_rays;
  l.time_budget = std::chrono::milliseconds(static_cast<long long>(o.time_limit * 1000));
  l.backend = backend_of(o);
  return l;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

RunManifest manifest(const Options& o, const EngineConfig& cfg, double tol_price, const Timer& t) {
  RunManifest m;
  m.inputs = {{"network", o.network}};
  if (!o.data.empty()) m.inputs.emplace_back("data", o.data);
  m.config = {{"tol_price", format_number(tol_price)},
              {"tol_price_source", o.tol_price ? "flag" : "default"},
              {"tol_feas", format_number(cfg.tol_feas)},
              {"tol_kkt", format_number(cfg.tol_kkt)},
              {"tol_act", format_number(cfg.tol_act)},
              {"max_iterations", std::to_string(cfg.max_iterations)},
              {"keep_zero_weight_modes", cfg.keep_zero_weight_modes ? "true" : "false"},
              {"backend", o.backend},
              {"format", o.format}};
  m.timings = t.laps();
  return m;
}

int cmd_solve(const Options& o) {
  Timer timer;
  const Network net = read_network_file(o.network);
  const MeasurementSet ms = read_measurement_file(o.data, net);
  timer.lap("parse");
  const EngineConfig cfg = engine_config(o);
  const ColGenResult r = run(net, ms, cfg);
  timer.lap("solve");

  const std::string result = o.format == "human" ? render_result_human(net, r) : render_result_tsv(net, r);
  const std::string m = manifest(o, cfg, r.tol_price, timer).render();
  if (o.out.empty()) {
    std::cout << result;
    std::cerr << m;
  } else {
    fs::create_directories(o.out);
    write_file(fs::path(o.out) / "result.tsv", render_result_tsv(net, r));
    write_file(fs::path(o.out) / "residuals.tsv", render_residuals_tsv(residual_by_metabolite(net, r)));
    write_file(fs::path(o.out) / "manifest.txt", m);
    if (o.format == "human") std::cout << result;
  }
  if (!r.certified)
    std::cerr << "warning: iteration limit reached; result is not a certified optimum (pricing value "
              << format_number(r.certificate_pricing) << ")\n";
  return r.certified ? kCertified : kNotCertified;
}

int cmd_enumerate(const Options& o) {
  const Network net = read_network_file(o.network);
  std::cout << render_enumeration(net, enumerate_efms(net, limits(o)));
  return kCertified;
}

int cmd_check(const Options& o) {
  const Network net = read_network_file(o.network);
  const MeasurementSet ms = read_measurement_file(o.data, net);
  const EngineConfig cfg = engine_config(o);
  const ColGenResult r = run(net, ms, cfg);
  std::cout << "colgen_objective\t" << format_number(r.objective) << '\n';
  std::cout << "colgen_certified\t" << (r.certified ? "true" : "false") << '\n';
  std::cout << "colgen_modes\t" << r.modes.size() << '\n';

  std::optional<FullSolution> full;
  try {
    full = solve_full(net, ms, limits(o));
  } catch (const LimitError& e) {
    std::cout << "oracle\trefused\n";
    std::cerr << "oracle: network too complex to enumerate (" << e.what() << "); column generation result above\n";
    return kOracleLimit;
  }
  const double gap = relative_gap(r.objective, full->objective, stack(ms, net).q.norm());
  const CertificateReport cert = check_certificate(net, ms, r, &full->enumeration.modes, cfg);
  std::cout << "oracle_objective\t" << format_number(full->objective) << '\n';
  std::cout << "oracle_efms\t" << full->enumeration.modes.size() << '\n';
  std::cout << "relative_gap\t" << format_number(gap) << '\n';
  std::cout << "certificate\t" << (cert.passed ? "pass" : cert.refused ? "refused" : "fail") << '\n';
  for (const auto& v : cert.violations) std::cerr << "violation: " << v << '\n';
  if (gap > 1e-6 || !cert.passed) return kCheckFailed;
  return kCertified;
}

void add_solver_flags(CLI::App* app, Options& o) {
  app->add_option("--data", o.data, "measurement table")->required()->check(CLI::ExistingFile);
  app->add_option("--tol-price", o.tol_price, "pricing threshold (default 1e-8 * (1 + |Q|_inf))")
      ->check(CLI::PositiveNumber);
  app->add_option("--tol-feas", o.tol_feas, "feasibility tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--tol-kkt", o.tol_kkt, "KKT tolerance of the master")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--max-iter", o.max_iter, "column generation iteration limit")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_flag("--keep-zero-modes", o.keep_zero, "keep modes whose final weight is zero");
}

void add_limit_flags(CLI::App* app, Options& o) {
  app->add_option("--max-columns", o.max_columns, "refuse enumeration above this many extended columns")
      ->capture_default_str();
  app->add_option("--max-rays", o.max_rays, "abort enumeration above this many intermediate rays")->capture_default_str();
  app->add_option("--time-limit", o.time_limit, "enumeration time budget in seconds")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elementary-flux-mode fitting of external flux data by column generation"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "fit the data, writing result, residual table and manifest");
  auto* enumerate = app.add_subcommand("enumerate", "list every elementary flux mode of a small network");
  auto* check = app.add_subcommand("check", "compare column generation with the full-enumeration fit");
  for (auto* sub : {solve, enumerate, check}) {
    sub->add_option("--network", o.network, "network file")->required()->check(CLI::ExistingFile);
    sub->add_option("--backend", o.backend, "parallel kernels: serial or openmp")
        ->capture_default_str()
        ->check(CLI::IsMember({"serial", "openmp"}));
  }
  add_solver_flags(solve, o);
  solve->add_option("--out", o.out, "directory for result.tsv, residuals.tsv, manifest.txt");
  solve->add_option("--format", o.format, "stdout format")->capture_default_str()->check(CLI::IsMember({"tsv", "human"}));
  add_limit_flags(enumerate, o);
  add_solver_flags(check, o);
  add_limit_flags(check, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*enumerate) return cmd_enumerate(o);
    return cmd_check(o);
  } catch (const LimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOracleLimit;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}
