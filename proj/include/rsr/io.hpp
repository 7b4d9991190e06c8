#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rsr/datagen.hpp"
#include "rsr/ggd.hpp"
#include "rsr/grassmann.hpp"
#include "rsr/stability.hpp"

// File formats. Floats are printed with 17 significant digits so that reading a
// file back reproduces every double exactly.
namespace rsr::io {

namespace fs = std::filesystem;

std::string format_double(double v);

/// `# subspace D=<D> d=<d>` then D rows of d comma-separated values.
void write_subspace(const fs::path& path, const Subspace& s);
Subspace read_subspace(const fs::path& path);

/// `<stem>.csv` (columns x0..x{D-1},label with label in {in,out}) and
/// `<stem>.meta.json` (seed, generator parameters, ground truth basis).
struct DatasetPaths {
  fs::path csv;
  fs::path meta;
};
DatasetPaths dataset_paths(const fs::path& csv_path);
DatasetPaths write_dataset(const fs::path& csv_path, const Dataset& data);
/// Reads the CSV and, when present, the sidecar metadata.
Dataset read_dataset(const fs::path& csv_path);

inline const std::vector<std::string> kTraceHeader = {
    "k", "step", "energy", "grad_norm", "theta_prev", "theta_truth", "stopped_reason"};

/// One row per record; stopped_reason is filled on the last row only, and absent
/// optional values are left empty.
void write_trace(const fs::path& path, const GgdTrace& trace);
std::vector<std::string> trace_row(const GgdRecord& rec, const std::string& stopped_reason);

/// key=value lines.
std::string to_key_value(const StabilityReport& rep);
std::string to_key_value(const NoisyStabilityReport& rep);
std::vector<std::string> report_header();
std::vector<std::string> report_row(const StabilityReport& rep);

/// Minimal CSV table: header plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
void write_csv(const fs::path& path, const CsvTable& table);
CsvTable read_csv(const fs::path& path);

/// Throws IoError unless the file's header equals `expected` and every row has
/// the header's width.
CsvTable check_csv_schema(const fs::path& path, const std::vector<std::string>& expected);

std::vector<std::string> split(const std::string& line, char sep);

}  // namespace rsr::io
