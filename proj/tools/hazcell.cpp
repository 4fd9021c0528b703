// hazcell: exposure and damage assessment of cell-network assets against hazard rasters.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hazcell/report.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("hazcell");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%l: %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("HAZCELL_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"; only honor it when spelled out.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

void log_rejections(const hazcell::IngestReport& report) {
  for (const auto& r : report.rejection_reasons) spdlog::info("asset line {}: {}", r.line, r.reason);
  if (report.rejected > 0) spdlog::warn("{} asset rows rejected", report.rejected);
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Cell-network climate hazard exposure and damage assessment"};
  app.require_subcommand(1);

  std::string manifest_path;
  std::string out_dir;
  unsigned workers = 0;
  std::string kind;
  std::string scenario;

  auto* validate = app.add_subcommand("validate", "Check a manifest and every file it references");
  validate->add_option("--manifest", manifest_path, "Scenario manifest (JSON)")->required();

  auto* assess = app.add_subcommand("assess", "Run every job and write per-layer and summary CSVs");
  assess->add_option("--manifest", manifest_path, "Scenario manifest (JSON)")->required();
  assess->add_option("--out", out_dir, "Output directory (default: manifest output_dir)");
  assess->add_option("--workers", workers, "Worker threads, 0 = all cores");

  auto* report = app.add_subcommand("report", "Write a tidy report CSV into the output directory");
  report->add_option("--out", out_dir, "Assessment output directory")->required();
  report->add_option("--kind", kind, "counts | costs | pct_change | zonal")->required();
  report->add_option("--manifest", manifest_path, "Scenario manifest (zonal only)");

  auto* geojson = app.add_subcommand("export-geojson", "Write a region map with per-region totals");
  geojson->add_option("--out", out_dir, "Assessment output directory")->required();
  geojson->add_option("--scenario", scenario, "Scenario key, e.g. riverine__RCP8.5__2050__rp100__GFDL-ESM2M")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*validate) {
      const auto outcome = hazcell::validate_inputs(manifest_path);
      for (const auto& line : outcome.lines) std::cout << line << '\n';
      std::cout << "ok\n";
    } else if (*assess) {
      const auto manifest = hazcell::read_manifest(manifest_path);
      const auto dir = out_dir.empty() ? manifest.resolve(manifest.output_dir) : std::filesystem::path(out_dir);
      spdlog::info("assessing {} jobs into {}", manifest.jobs.size(), dir.string());
      const auto outcome = hazcell::assess_to_directory(manifest, dir, workers);
      log_rejections(outcome.assets);
      std::cout << outcome.jobs << " jobs, " << outcome.assets.accepted << " assets, " << outcome.files.size()
                << " files written to " << dir.string() << '\n';
    } else if (*report) {
      const auto k = hazcell::parse_report_kind(kind);
      std::optional<hazcell::Manifest> manifest;
      if (!manifest_path.empty()) manifest = hazcell::read_manifest(manifest_path);
      const auto path = hazcell::write_report(out_dir, k, manifest ? &*manifest : nullptr);
      std::cout << path.string() << '\n';
    } else if (*geojson) {
      std::cout << hazcell::export_geojson(out_dir, scenario).string() << '\n';
    }
  } catch (const hazcell::ValidationError& e) {
    spdlog::error("{}", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return 0;
}
