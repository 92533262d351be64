#include "kfp/output.hpp"

#include <fstream>
#include <system_error>

#include <fmt/core.h>

namespace kfp {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw OutputError(fmt::format("cannot create '{}': {}", path.parent_path().string(),
                                    ec.message()));
    }
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError(fmt::format("cannot open '{}' for writing", tmp.string()));
    out << content;
    out.flush();
    if (!out) throw OutputError(fmt::format("write to '{}' failed", tmp.string()));
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw OutputError(fmt::format("cannot rename onto '{}'", path.string()));
  }
}

std::string format_norms_csv(const std::vector<NormRecord>& norms) {
  std::string out = "time,l2,linf\n";
  for (const auto& r : norms) out += fmt::format("{:.17g},{:.17g},{:.17g}\n", r.time, r.l2, r.linf);
  return out;
}

std::string format_errors_csv(const std::vector<ErrorRow>& rows) {
  std::string out = "h,dt,time,l2_error,linf_error,order\n";
  for (const auto& r : rows) {
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},", r.h, r.dt, r.time,
                       r.l2_error, r.linf_error);
    if (r.order) out += fmt::format("{:.17g}", *r.order);
    out += '\n';
  }
  return out;
}

std::string format_grid(const Field& field) {
  const TriMesh& mesh = *field.mesh;
  const int nv = mesh.n() + 1;
  const RectDomain& d = mesh.domain();
  std::string out = fmt::format("# {} {} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g}\n", nv, nv,
                                d.v_min(), d.v_max(), d.z_min(), d.z_max(), field.time);
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nv; ++i) {
      if (i > 0) out += ' ';
      out += fmt::format("{:.17g}", field.values[static_cast<std::size_t>(mesh.node_index(i, j))]);
    }
    out += '\n';
  }
  return out;
}

OutputBundle emit_outputs(const Trajectory& traj, const RunConfig& config,
                          const std::vector<ErrorRow>& errors, const std::string& report) {
  const fs::path dir = config.output_dir;
  OutputBundle bundle;
  auto emit = [&](const fs::path& name, const std::string& content) {
    write_atomic(dir / name, content);
    bundle.files.push_back(dir / name);
  };
  emit("norms.csv", format_norms_csv(traj.norms));
  if (!errors.empty()) emit("errors.csv", format_errors_csv(errors));
  if (config.snapshot_stride > 0) {
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      emit(fmt::format("field_{:05d}.grid", k), format_grid(traj.snapshots[k].field));
    }
  }
  emit("report.txt", report);
  return bundle;
}

}  // namespace kfp
