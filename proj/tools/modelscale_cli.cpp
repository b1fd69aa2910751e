// modelscale: experiment runner and plot tool.
//
//   modelscale run <experiment> [--config F] [--seed N] [--out-dir D] [--key value ...]
//   modelscale plot --csv F --x COL --y COL[,COL] [--group COL] [--step] --out F.svg
//   modelscale list

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "modelscale/harness/config.hpp"
#include "modelscale/harness/experiments.hpp"
#include "modelscale/harness/plot.hpp"

using namespace modelscale::harness;

namespace {

// Remaining "--key value" or "--key=value" tokens become config overrides.
void apply_overrides(const std::vector<std::string>& extras, Config& cfg) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0 || tok.size() < 3) {
      throw ConfigError("unexpected argument '" + tok + "'");
    }
    std::string key = tok.substr(2), value;
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) throw ConfigError("missing value for --" + key);
      value = extras[++i];
    }
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    cfg.set(key, value);
  }
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modelscale experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment and write CSV, SVG and manifest.json");
  std::string experiment, config_path, out_dir, seed;
  run->add_option("experiment", experiment, "psgd | select | restrict | markov | regression | "
                                            "participation | scaling-curve (or taken from the config)");
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--seed", seed, "random seed (required by stochastic experiments)");
  run->add_option("--out-dir", out_dir, "output directory (default out/<experiment>)");
  run->allow_extras();

  auto* plot = app.add_subcommand("plot", "render an SVG chart from CSV columns");
  std::string csv, x, ys, group, out, title;
  bool step = false, log_x = false, log_y = false;
  plot->add_option("--csv", csv)->required();
  plot->add_option("--x", x)->required();
  plot->add_option("--y", ys, "comma-separated columns")->required();
  plot->add_option("--group", group, "series per distinct value of this column");
  plot->add_option("--out", out)->required();
  plot->add_option("--title", title);
  plot->add_flag("--step", step);
  plot->add_flag("--log-x", log_x);
  plot->add_flag("--log-y", log_y);

  app.add_subcommand("list", "list experiment names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (app.got_subcommand("list")) {
    for (const auto& n : experiment_names()) std::cout << n << "\n";
    return 0;
  }

  if (app.got_subcommand("plot")) {
    try {
      PlotSpec spec;
      spec.title = title;
      spec.x_column = x;
      spec.y_columns = split_commas(ys);
      spec.group_column = group;
      spec.step = step;
      spec.log_x = log_x;
      spec.log_y = log_y;
      emit_plot(csv, spec, out);
    } catch (const modelscale::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitConfig;
    }
    return 0;
  }

  Config cfg;
  try {
    if (!config_path.empty()) cfg = Config::load(config_path);
    apply_overrides(run->remaining(), cfg);
    if (!seed.empty()) cfg.set("seed", seed);
    if (experiment.empty()) experiment = cfg.get_string("experiment", "");
    if (experiment.empty()) throw ConfigError("no experiment given");
    bool known = false;
    for (const auto& n : experiment_names()) known = known || n == experiment;
    if (!known) throw ConfigError("unknown experiment '" + experiment + "'");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (out_dir.empty()) out_dir = "out/" + experiment;

  const auto outcome = run_with_manifest(experiment, cfg, out_dir);
  if (outcome.exit_status != kExitOk) {
    std::cerr << "error: " << outcome.manifest["error"].dump() << "\n";
  } else {
    std::cout << outcome.manifest["summary"].dump(2) << "\n";
  }
  std::cout << "manifest: " << (std::filesystem::path(out_dir) / "manifest.json").string() << "\n";
  return outcome.exit_status;
}
