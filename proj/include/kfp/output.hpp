#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "kfp/analysis.hpp"
#include "kfp/solvers.hpp"

namespace kfp {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Write through a temporary file in the same directory, then rename.
/// Throws OutputError on any failure.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string format_norms_csv(const std::vector<NormRecord>& norms);
std::string format_errors_csv(const std::vector<ErrorRow>& rows);
/// `# nv nz v_min v_max z_min z_max time` followed by nz rows of nv values.
std::string format_grid(const Field& field);

struct OutputBundle {
  std::vector<std::filesystem::path> files;
};

/// norms.csv, optional errors.csv, field_NNNNN.grid for snapshots (only
/// when snapshot_stride > 0) and report.txt.
OutputBundle emit_outputs(const Trajectory& traj, const RunConfig& config,
                          const std::vector<ErrorRow>& errors, const std::string& report);

}  // namespace kfp
