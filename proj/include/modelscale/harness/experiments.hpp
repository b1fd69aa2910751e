#pragma once

// Experiment runners behind `modelscale run`. Each writes its CSVs (and
// SVGs unless plot = false) into the output directory and a manifest.json
// recording the config, per-file SHA-256, a summary and the runtime.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "modelscale/errors.hpp"
#include "modelscale/harness/config.hpp"
#include "modelscale/harness/csv.hpp"
#include "modelscale/harness/plot.hpp"

namespace modelscale::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitFailure = 3;

// A solver ran but a certificate or equilibrium check did not pass.
class CertificationFailure : public Error {
 public:
  CertificationFailure(const std::string& what, nlohmann::json detail)
      : Error(what), detail_(std::move(detail)) {}
  const nlohmann::json& detail() const { return detail_; }

 private:
  nlohmann::json detail_;
};

std::string artifact_version();

// Lowercase hex SHA-256 of the file contents.
std::string sha256_file(const std::filesystem::path& path);

class RunContext {
 public:
  RunContext(std::filesystem::path out_dir, bool plots);

  const std::filesystem::path& out_dir() const { return out_dir_; }
  bool plots() const { return plots_; }

  std::filesystem::path write_csv(const std::string& name, const CsvTable& table);
  std::filesystem::path write_text(const std::string& name, const std::string& text);
  std::filesystem::path write_plot(const std::string& name, const std::string& csv_name,
                                   const PlotSpec& spec);

  const std::vector<std::filesystem::path>& files() const { return files_; }
  nlohmann::json& summary() { return summary_; }

 private:
  std::filesystem::path out_dir_;
  bool plots_;
  std::vector<std::filesystem::path> files_;
  nlohmann::json summary_ = nlohmann::json::object();
};

const std::vector<std::string>& experiment_names();

// Runs one experiment. Throws ConfigError for bad keys or values and
// CertificationFailure or other library errors for failed runs.
void run_experiment(const std::string& name, const Config& config, RunContext& ctx);

struct RunOutcome {
  int exit_status = kExitOk;
  nlohmann::json manifest;
};

// run_experiment plus error mapping and manifest.json. Status 2 for invalid
// config, 3 for solver or certification failures.
RunOutcome run_with_manifest(const std::string& name, const Config& config,
                             const std::filesystem::path& out_dir);

}  // namespace modelscale::harness
