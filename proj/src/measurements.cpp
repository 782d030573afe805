#include "efmcg/measurements.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "efmcg/errors.hpp"

namespace efmcg {

std::size_t MeasurementSet::missing_count() const {
  std::size_t n = 0;
  for (const auto& row : values)
    for (const auto& v : row)
      if (!v) ++n;
  return n;
}

std::optional<double> MeasurementSet::value(std::string_view metabolite, std::string_view repetition) const {
  auto m = std::find(metabolites.begin(), metabolites.end(), metabolite);
  auto k = std::find(repetitions.begin(), repetitions.end(), repetition);
  if (m == metabolites.end() || k == repetitions.end()) return std::nullopt;
  return values[m - metabolites.begin()][k - repetitions.begin()];
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_cells(std::string_view line) {
  std::vector<std::string> cells;
  char delim = 0;
  if (line.find('\t') != std::string_view::npos)
    delim = '\t';
  else if (line.find(',') != std::string_view::npos)
    delim = ',';
  if (delim == 0) {
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) cells.push_back(tok);
    return cells;
  }
  std::size_t pos = 0;
  while (true) {
    auto next = line.find(delim, pos);
    cells.emplace_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return cells;
}

bool is_missing(std::string_view cell) {
  return cell.size() == 2 && std::tolower(static_cast<unsigned char>(cell[0])) == 'n' &&
         std::tolower(static_cast<unsigned char>(cell[1])) == 'a';
}

std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

bool is_value_cell(std::string_view cell) { return is_missing(cell) || parse_number(cell).has_value(); }

}  // namespace

MeasurementSet parse_measurements(std::string_view text, const Network& network) {
  struct Line {
    std::size_t number;
    std::vector<std::string> cells;
  };
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view line = text.substr(pos, end - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) lines.push_back({number, split_cells(line)});
    pos = end + 1;
  }
  if (lines.empty()) throw InputError("measurement table is empty");

  MeasurementSet ms;
  std::size_t first_data = 0;
  const auto& head = lines.front().cells;
  const bool headerless = head.size() >= 2 && network.external_row(head[0]).has_value() &&
                          std::all_of(head.begin() + 1, head.end(), [](const std::string& c) { return is_value_cell(c); });
  if (headerless) {
    for (std::size_t k = 1; k < head.size(); ++k) ms.repetitions.push_back("rep" + std::to_string(k));
  } else {
    if (head.size() < 2) throw ParseError(lines.front().number, "header needs at least one repetition column");
    std::unordered_set<std::string> seen;
    for (std::size_t k = 1; k < head.size(); ++k) {
      if (head[k].empty()) throw ParseError(lines.front().number, "empty repetition id");
      if (!seen.insert(head[k]).second) throw ParseError(lines.front().number, "duplicate repetition id " + head[k]);
      ms.repetitions.push_back(head[k]);
    }
    first_data = 1;
  }

  std::unordered_set<std::string> seen_rows;
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    const auto& [line_no, cells] = lines[i];
    if (cells.size() != ms.repetitions.size() + 1)
      throw ParseError(line_no, "expected " + std::to_string(ms.repetitions.size() + 1) + " cells, got " +
                                    std::to_string(cells.size()));
    const std::string& name = cells[0];
    if (!network.external_row(name)) throw ParseError(line_no, "unknown metabolite " + name + " (not external in network)");
    if (!seen_rows.insert(name).second) throw ParseError(line_no, "duplicate metabolite row " + name);
    std::vector<std::optional<double>> row;
    for (std::size_t k = 1; k < cells.size(); ++k) {
      if (is_missing(cells[k])) {
        row.push_back(std::nullopt);
        continue;
      }
      auto v = parse_number(cells[k]);
      if (!v) throw ParseError(line_no, "non-numeric cell '" + cells[k] + "'");
      row.push_back(*v);
    }
    ms.metabolites.push_back(name);
    ms.values.push_back(std::move(row));
  }
  if (ms.metabolites.empty()) throw InputError("measurement table has no data rows");
  for (std::size_t k = 0; k < ms.repetitions.size(); ++k) {
    const bool any = std::any_of(ms.values.begin(), ms.values.end(), [k](const auto& row) { return row[k].has_value(); });
    if (!any) throw InputError("repetition " + ms.repetitions[k] + " has no measured value");
  }
  return ms;
}

MeasurementSet read_measurement_file(const std::filesystem::path& path, const Network& network) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read measurement file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_measurements(buf.str(), network);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path.string());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string render_measurements(const MeasurementSet& ms) {
  std::string out = "metabolite";
  for (const auto& r : ms.repetitions) out += "\t" + r;
  out += "\n";
  char buf[64];
  for (std::size_t m = 0; m < ms.metabolites.size(); ++m) {
    out += ms.metabolites[m];
    for (const auto& v : ms.values[m]) {
      if (v) {
        std::snprintf(buf, sizeof buf, "%.17g", *v);
        out += "\t";
        out += buf;
      } else {
        out += "\tNa";
      }
    }
    out += "\n";
  }
  return out;
}

StackedSystem stack(const MeasurementSet& ms, const Network& network) {
  const std::size_t nx = network.external_count();
  // cell[row of A_x][repetition] -> index into ms.values
  std::vector<std::optional<std::size_t>> source(nx);
  for (std::size_t m = 0; m < ms.metabolites.size(); ++m) {
    auto row = network.external_row(ms.metabolites[m]);
    if (!row) throw InputError("measured metabolite " + ms.metabolites[m] + " is not external in the network");
    if (source[*row]) throw InputError("metabolite " + ms.metabolites[m] + " measured twice");
    source[*row] = m;
  }

  StackedSystem sys;
  sys.repetition_count = ms.repetitions.size();
  sys.blocks.resize(ms.repetitions.size());
  std::vector<double> q;
  for (std::size_t k = 0; k < ms.repetitions.size(); ++k) {
    for (std::size_t r = 0; r < nx; ++r) {
      if (!source[r]) continue;
      const auto& cell = ms.values[*source[r]][k];
      if (!cell) continue;
      q.push_back(*cell);
      sys.rows.push_back({k, r});
      sys.blocks[k].push_back(r);
    }
  }
  if (q.empty()) throw InputError("no measured values to fit (all cells missing)");
  sys.q = Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
  return sys;
}

Eigen::MatrixXd StackedSystem::apply(const Eigen::MatrixXd& per_external) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), per_external.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = per_external.row(rows[i].external_row);
  return out;
}

Eigen::VectorXd StackedSystem::apply(const Eigen::VectorXd& per_external) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(i) = per_external(rows[i].external_row);
  return out;
}

}  // namespace efmcg
