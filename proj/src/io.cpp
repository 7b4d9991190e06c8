#include "rsr/io.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rsr::io {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

double parse_double(const std::string& cell, const fs::path& path) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw IoError("bad number '" + cell + "' in " + path.string());
  return v;
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

nlohmann::json basis_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

Matrix basis_from_json(const nlohmann::json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = n > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

}  // namespace

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) cells.push_back(cell);
  if (!line.empty() && line.back() == sep) cells.emplace_back();
  return cells;
}

void write_subspace(const fs::path& path, const Subspace& s) {
  std::ofstream out = open_out(path);
  out << "# subspace D=" << s.ambient_dim() << " d=" << s.dim() << "\n";
  for (Eigen::Index i = 0; i < s.ambient_dim(); ++i) {
    for (Eigen::Index j = 0; j < s.dim(); ++j) {
      if (j) out << ',';
      out << format_double(s.basis()(i, j));
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Subspace read_subspace(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  long long big_d = 0, d = 0;
  if (!std::getline(in, line) || std::sscanf(line.c_str(), "# subspace D=%lld d=%lld", &big_d, &d) != 2)
    throw IoError("missing '# subspace D=<D> d=<d>' header in " + path.string());
  if (big_d < 1 || d < 1 || d > big_d) throw IoError("bad subspace shape in " + path.string());
  Matrix m(big_d, d);
  for (long long i = 0; i < big_d; ++i) {
    if (!std::getline(in, line)) throw IoError("truncated subspace file " + path.string());
    const auto cells = split(line, ',');
    if (static_cast<long long>(cells.size()) != d) throw IoError("bad row width in " + path.string());
    for (long long j = 0; j < d; ++j) m(i, j) = parse_double(cells[static_cast<std::size_t>(j)], path);
  }
  return Subspace(std::move(m));
}

DatasetPaths dataset_paths(const fs::path& csv_path) {
  fs::path meta = csv_path;
  meta.replace_extension(".meta.json");
  return {csv_path, meta};
}

DatasetPaths write_dataset(const fs::path& csv_path, const Dataset& data) {
  const DatasetPaths paths = dataset_paths(csv_path);
  const Eigen::Index big_d = data.ambient_dim();
  {
    std::ofstream out = open_out(paths.csv);
    for (Eigen::Index a = 0; a < big_d; ++a) out << 'x' << a << ',';
    out << "label\n";
    auto emit = [&](const PointSet& pts, const char* label) {
      for (Eigen::Index i = 0; i < pts.cols(); ++i) {
        for (Eigen::Index a = 0; a < big_d; ++a) out << format_double(pts(a, i)) << ',';
        out << label << "\n";
      }
    };
    emit(data.inliers, "in");
    emit(data.outliers, "out");
    if (!out) throw IoError("write failed: " + paths.csv.string());
  }
  nlohmann::json meta = data.meta;
  meta["D"] = big_d;
  meta["n_in"] = data.n_in();
  meta["n_out"] = data.n_out();
  meta["noise_epsilon"] = data.noise_epsilon ? nlohmann::json(*data.noise_epsilon) : nlohmann::json();
  if (data.l_star) {
    meta["d"] = data.l_star->dim();
    meta["ground_truth"] = basis_to_json(data.l_star->basis());
  } else {
    meta["ground_truth"] = nullptr;
  }
  std::ofstream out = open_out(paths.meta);
  // json's default float output is shortest-round-trip, which is exact.
  out << meta.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + paths.meta.string());
  return paths;
}

Dataset read_dataset(const fs::path& csv_path) {
  const DatasetPaths paths = dataset_paths(csv_path);
  std::ifstream in = open_in(paths.csv);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty dataset file " + paths.csv.string());
  const auto header = split(line, ',');
  if (header.size() < 2 || header.back() != "label")
    throw IoError("dataset header must end with 'label': " + paths.csv.string());
  const auto big_d = static_cast<Eigen::Index>(header.size() - 1);

  std::vector<std::vector<double>> ins, outs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (static_cast<Eigen::Index>(cells.size()) != big_d + 1)
      throw IoError("bad row width in " + paths.csv.string());
    std::vector<double> p(static_cast<std::size_t>(big_d));
    for (Eigen::Index a = 0; a < big_d; ++a)
      p[static_cast<std::size_t>(a)] = parse_double(cells[static_cast<std::size_t>(a)], paths.csv);
    if (cells.back() == "in")
      ins.push_back(std::move(p));
    else if (cells.back() == "out")
      outs.push_back(std::move(p));
    else
      throw IoError("label must be 'in' or 'out' in " + paths.csv.string());
  }
  auto to_matrix = [big_d](const std::vector<std::vector<double>>& pts) {
    PointSet m(big_d, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (Eigen::Index a = 0; a < big_d; ++a)
        m(a, static_cast<Eigen::Index>(i)) = pts[i][static_cast<std::size_t>(a)];
    return m;
  };
  Dataset data;
  data.inliers = to_matrix(ins);
  data.outliers = to_matrix(outs);

  if (fs::exists(paths.meta)) {
    std::ifstream mi = open_in(paths.meta);
    try {
      data.meta = nlohmann::json::parse(mi);
    } catch (const nlohmann::json::exception& e) {
      throw IoError("malformed metadata " + paths.meta.string() + ": " + e.what());
    }
    if (data.meta.contains("ground_truth") && !data.meta["ground_truth"].is_null()) {
      data.l_star = Subspace(basis_from_json(data.meta["ground_truth"]));
      if (data.l_star->ambient_dim() != big_d) throw IoError("ground truth dimension mismatch");
    }
    if (data.meta.contains("noise_epsilon") && !data.meta["noise_epsilon"].is_null())
      data.noise_epsilon = data.meta["noise_epsilon"].get<double>();
    data.meta.erase("ground_truth");
  }
  return data;
}

std::vector<std::string> trace_row(const GgdRecord& rec, const std::string& stopped_reason) {
  return {std::to_string(rec.k), format_double(rec.step),       format_double(rec.energy),
          format_double(rec.grad_norm), opt(rec.theta_prev), opt(rec.theta_truth),
          stopped_reason};
}

void write_trace(const fs::path& path, const GgdTrace& trace) {
  CsvTable table{kTraceHeader, {}};
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const bool last = i + 1 == trace.records.size();
    table.rows.push_back(trace_row(trace.records[i], last ? to_string(trace.stopped_reason) : ""));
  }
  write_csv(path, table);
}

std::string to_key_value(const StabilityReport& rep) {
  std::ostringstream os;
  os << "permeance=" << format_double(rep.permeance) << "\n"
     << "alignment_at_center=" << format_double(rep.alignment_at_center) << "\n"
     << "alignment_sup_estimate=" << format_double(rep.alignment_sup_estimate) << "\n"
     << "alignment_global_bound=" << format_double(rep.alignment_global_bound) << "\n"
     << "gamma=" << format_double(rep.gamma) << "\n"
     << "s_sampled=" << format_double(rep.s_sampled) << "\n"
     << "s_global_lower=" << format_double(rep.s_global_lower) << "\n"
     << "n_samples=" << rep.n_samples << "\n"
     << "seed=" << rep.seed << "\n";
  return os.str();
}

std::string to_key_value(const NoisyStabilityReport& rep) {
  std::ostringstream os;
  os << "epsilon=" << format_double(rep.epsilon) << "\n"
     << "delta=" << format_double(rep.delta) << "\n"
     << "gamma=" << format_double(rep.gamma) << "\n"
     << "eta=" << format_double(rep.eta) << "\n"
     << "trimmed_permeance_term=" << format_double(rep.trimmed_permeance_term) << "\n"
     << "small_projection_term=" << format_double(rep.small_projection_term) << "\n"
     << "alignment_sup_estimate=" << format_double(rep.alignment_sup_estimate) << "\n"
     << "s_n=" << format_double(rep.s_n) << "\n"
     << "n_direction_samples=" << rep.n_direction_samples << "\n"
     << "n_subspace_samples=" << rep.n_subspace_samples << "\n"
     << "seed=" << rep.seed << "\n";
  return os.str();
}

std::vector<std::string> report_header() {
  return {"permeance", "alignment_at_center", "alignment_sup_estimate", "alignment_global_bound",
          "gamma",     "s_sampled",           "s_global_lower",         "n_samples",
          "seed"};
}

std::vector<std::string> report_row(const StabilityReport& rep) {
  return {format_double(rep.permeance),
          format_double(rep.alignment_at_center),
          format_double(rep.alignment_sup_estimate),
          format_double(rep.alignment_global_bound),
          format_double(rep.gamma),
          format_double(rep.s_sampled),
          format_double(rep.s_global_lower),
          std::to_string(rep.n_samples),
          std::to_string(rep.seed)};
}

void write_csv(const fs::path& path, const CsvTable& table) {
  std::ofstream out = open_out(path);
  out << join(table.header) << "\n";
  for (const auto& row : table.rows) out << join(row) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv " + path.string());
  table.header = split(line, ',');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(split(line, ','));
  }
  return table;
}

CsvTable check_csv_schema(const fs::path& path, const std::vector<std::string>& expected) {
  CsvTable table = read_csv(path);
  if (table.header != expected)
    throw IoError("unexpected header in " + path.string() + ": " + join(table.header));
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    if (table.rows[i].size() != expected.size())
      throw IoError("row " + std::to_string(i + 1) + " of " + path.string() + " has " +
                    std::to_string(table.rows[i].size()) + " cells, expected " +
                    std::to_string(expected.size()));
  return table;
}

}  // namespace rsr::io
