#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>

#include "modelscale/harness/experiments.hpp"

#ifndef MODELSCALE_VERSION
#define MODELSCALE_VERSION "0.0.0"
#endif

namespace modelscale::harness {

std::string artifact_version() { return MODELSCALE_VERSION; }

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest init failed");
  }
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0 && EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount())) != 1) {
      throw Error("sha256: digest update failed");
    }
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) throw Error("sha256: digest final failed");
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

RunContext::RunContext(std::filesystem::path out_dir, bool plots)
    : out_dir_(std::move(out_dir)), plots_(plots) {}

std::filesystem::path RunContext::write_csv(const std::string& name, const CsvTable& table) {
  const auto path = out_dir_ / name;
  harness::write_csv(path, table);
  files_.push_back(path);
  return path;
}

std::filesystem::path RunContext::write_text(const std::string& name, const std::string& text) {
  const auto path = out_dir_ / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path.string());
  out << text;
  files_.push_back(path);
  return path;
}

std::filesystem::path RunContext::write_plot(const std::string& name, const std::string& csv_name,
                                             const PlotSpec& spec) {
  const auto path = out_dir_ / name;
  emit_plot(out_dir_ / csv_name, spec, path);
  files_.push_back(path);
  return path;
}

RunOutcome run_with_manifest(const std::string& name, const Config& config,
                             const std::filesystem::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  nlohmann::json& m = outcome.manifest;
  m["artifact_version"] = artifact_version();
  m["experiment"] = name;
  m["config"] = config.entries();

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    outcome.exit_status = kExitConfig;
    m["status"] = "error";
    m["error"] = {{"kind", "config"}, {"message", "cannot create output directory " + out_dir.string()}};
    m["exit_status"] = outcome.exit_status;
    return outcome;
  }

  RunContext ctx(out_dir, config.get_bool("plot", true));
  auto fail = [&](int status, const std::string& kind, const std::string& message) {
    outcome.exit_status = status;
    m["status"] = "error";
    m["error"] = {{"kind", kind}, {"message", message}};
  };
  try {
    run_experiment(name, config, ctx);
    m["status"] = "ok";
  } catch (const ConfigError& e) {
    fail(kExitConfig, "config", e.what());
  } catch (const PlotError& e) {
    fail(kExitConfig, "plot", e.what());
  } catch (const ArgumentError& e) {
    fail(kExitConfig, "argument", e.what());
  } catch (const CertificationFailure& e) {
    fail(kExitFailure, "certification", e.what());
    m["error"]["detail"] = e.detail();
  } catch (const Error& e) {
    fail(kExitFailure, "solver", e.what());
  }
  m["exit_status"] = outcome.exit_status;
  m["summary"] = ctx.summary();

  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& f : ctx.files()) {
    outputs.push_back({{"file", f.filename().string()},
                       {"bytes", std::filesystem::file_size(f)},
                       {"sha256", sha256_file(f)}});
  }
  m["outputs"] = outputs;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m["runtime_seconds"] = secs;

  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  out << m.dump(2) << "\n";
  return outcome;
}

}  // namespace modelscale::harness
