#include "kfp/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

namespace kfp {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError(key, fmt::format("malformed number '{}'", text));
  }
  return value;
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError(key, fmt::format("malformed integer '{}'", text));
  }
  return value;
}

// Keys in serialization order.
const std::vector<std::string> kKeys = {"form",  "n",   "dt",  "t-end",    "domain",
                                        "theta", "sigma1", "tol", "max-iter", "snapshot-stride",
                                        "out",   "seed"};

}  // namespace

const char* to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::run: return "run";
    case CommandKind::convergence: return "convergence";
    case CommandKind::compare: return "compare";
    case CommandKind::norms: return "norms";
    case CommandKind::kernel_check: return "kernel-check";
    case CommandKind::poincare_check: return "poincare-check";
    case CommandKind::nested_domains: return "nested-domains";
  }
  return "?";
}

std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "form") {
    try {
      config.form = form_from_string(trim(value));
    } catch (const std::invalid_argument&) {
      throw ConfigError(key, fmt::format("unknown form '{}'", value));
    }
  } else if (key == "n") {
    config.n = parse_integer<int>(key, value);
  } else if (key == "dt") {
    config.dt = parse_real(key, value);
  } else if (key == "t-end") {
    config.horizon = parse_real(key, value);
  } else if (key == "domain") {
    const auto b = parse_real_list(key, value);
    if (b.size() != 4) throw ConfigError(key, "expected vmin,vmax,zmin,zmax");
    try {
      config.domain = RectDomain(b[0], b[1], b[2], b[3]);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  } else if (key == "theta") {
    config.theta = parse_real(key, value);
  } else if (key == "sigma1") {
    config.sigma1 = parse_real(key, value);
  } else if (key == "tol") {
    config.tol = parse_real(key, value);
  } else if (key == "max-iter") {
    config.max_iter = parse_integer<int>(key, value);
  } else if (key == "snapshot-stride") {
    config.snapshot_stride = parse_integer<int>(key, value);
  } else if (key == "out") {
    config.output_dir = trim(value);
  } else if (key == "seed") {
    config.seed = parse_integer<std::uint64_t>(key, value);
  } else {
    throw ConfigError(key, "unknown key");
  }
}

void apply_config_text(RunConfig& config, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(trim(line), fmt::format("line {}: expected 'key = value'", lineno));
    }
    apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

RunConfig read_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", fmt::format("cannot read '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  apply_config_text(base, buffer.str());
  return base;
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  out += fmt::format("form = {}\n", to_string(c.form));
  out += fmt::format("n = {}\n", c.n);
  out += fmt::format("dt = {:.17g}\n", c.dt);
  out += fmt::format("t-end = {:.17g}\n", c.horizon);
  out += fmt::format("domain = {:.17g},{:.17g},{:.17g},{:.17g}\n", c.domain.v_min(),
                     c.domain.v_max(), c.domain.z_min(), c.domain.z_max());
  out += fmt::format("theta = {:.17g}\n", c.theta);
  out += fmt::format("sigma1 = {:.17g}\n", c.sigma1);
  out += fmt::format("tol = {:.17g}\n", c.tol);
  out += fmt::format("max-iter = {}\n", c.max_iter);
  out += fmt::format("snapshot-stride = {}\n", c.snapshot_stride);
  out += fmt::format("out = {}\n", c.output_dir);
  out += fmt::format("seed = {}\n", c.seed);
  return out;
}

Invocation parse_config(int argc, const char* const* argv) {
  CLI::App app{"Kolmogorov-Fokker-Planck finite element solver", "kfp"};
  app.require_subcommand(1, 1);
  // Subcommands inherit this, so global flags may follow the command name.
  app.fallthrough();

  std::map<std::string, std::string> flags;
  std::string config_path;
  auto add_key = [&](const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(
           "--" + key, [&flags, key](const std::string& v) { flags[key] = v; }, help)
        ->option_text(" VALUE");
  };
  add_key("form", "original | lagrangian | selfsimilar");
  add_key("n", "mesh subdivisions per side");
  add_key("dt", "time step (Δs for the self-similar form)");
  add_key("t-end", "final physical time t");
  add_key("domain", "vmin,vmax,zmin,zmax");
  add_key("theta", "θ-scheme parameter in [0,1]");
  add_key("sigma1", "reaction split, at most 1");
  add_key("tol", "linear solver relative tolerance");
  add_key("max-iter", "linear solver iteration cap");
  add_key("snapshot-stride", "steps between field snapshots (0 = none)");
  add_key("out", "output directory");
  add_key("seed", "random seed");
  app.add_option("--config", config_path, "flat key = value file");

  Invocation inv;
  std::string levels, t_grid, scales, trials;
  app.add_subcommand("run", "single run with errors against the exact solution");
  app.add_subcommand("convergence", "mesh refinement study")
      ->add_option("--levels", levels, "h1,h2,...");
  app.add_subcommand("compare", "all three formulations at the same settings");
  app.add_subcommand("norms", "norm time series with decay fits");
  app.add_subcommand("kernel-check", "kernel norm identities");
  auto* pc = app.add_subcommand("poincare-check", "directional Poincaré inequality");
  pc->add_option("--trials", trials, "random fields per t");
  pc->add_option("--t-grid", t_grid, "t1,t2,...");
  app.add_subcommand("nested-domains", "growing-domain study")
      ->add_option("--scales", scales, "s1,s2,...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    inv.help = app.help();
    return inv;
  } catch (const CLI::ParseError& e) {
    throw ConfigError("command-line", e.what());
  }

  RunConfig config;
  if (!config_path.empty()) config = read_config_file(config_path, config);
  for (const auto& key : kKeys) {
    if (auto it = flags.find(key); it != flags.end()) apply_setting(config, key, it->second);
  }
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw ConfigError(what.substr(0, what.find(':')), what.substr(what.find(':') + 2));
  }

  const std::string name = app.get_subcommands().front()->get_name();
  for (auto kind : {CommandKind::run, CommandKind::convergence, CommandKind::compare,
                    CommandKind::norms, CommandKind::kernel_check, CommandKind::poincare_check,
                    CommandKind::nested_domains}) {
    if (name == to_string(kind)) inv.command.kind = kind;
  }
  if (!levels.empty()) inv.command.levels = parse_real_list("levels", levels);
  if (!scales.empty()) inv.command.scales = parse_real_list("scales", scales);
  if (!t_grid.empty()) inv.command.t_grid = parse_real_list("t-grid", t_grid);
  if (!trials.empty()) {
    inv.command.trials = parse_integer<int>("trials", trials);
    if (inv.command.trials < 1) throw ConfigError("trials", "must be >= 1");
  }
  if (inv.command.t_grid.empty()) {
    for (int k = 0; k <= 20; ++k) inv.command.t_grid.push_back(0.25 * k);
  }
  inv.config = config;
  return inv;
}

}  // namespace kfp
