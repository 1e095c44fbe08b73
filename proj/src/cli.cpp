#include "tradescope/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tradescope/corpus.hpp"
#include "tradescope/csv_io.hpp"
#include "tradescope/degrade.hpp"
#include "tradescope/edsr.hpp"
#include "tradescope/error.hpp"
#include "tradescope/iqa.hpp"
#include "tradescope/manifest.hpp"
#include "tradescope/sr_backends.hpp"
#include "tradescope/sweep.hpp"

namespace tradescope {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitPipeline = 3;
constexpr int kExitBackend = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return kExitValidation;
    case ErrorKind::Io: return kExitIo;
    case ErrorKind::Pipeline: return kExitPipeline;
    case ErrorKind::Backend: return kExitBackend;
  }
  return kExitPipeline;
}

int default_jobs() {
  if (const char* env = std::getenv("TRADESCOPE_JOBS")) {
    try {
      const int jobs = std::stoi(env);
      if (jobs >= 1) return jobs;
    } catch (const std::exception&) {
    }
    throw ValidationError("TRADESCOPE_JOBS must be a positive integer");
  }
  return 1;
}

struct OpticsFlags {
  double wavelength = 560e-9;
  double altitude = 500e3;
  double obscuration = 0.4;

  void add(CLI::App& app) {
    app.add_option("--wavelength", wavelength, "Central wavelength [m]")
        ->capture_default_str();
    app.add_option("--altitude", altitude, "Orbit altitude [m]")
        ->capture_default_str();
    app.add_option("--obscuration", obscuration,
                   "Inner-to-outer aperture diameter ratio")
        ->capture_default_str();
  }

  OpticsSpec spec() const {
    OpticsSpec s;
    s.wavelength = wavelength;
    s.altitude = altitude;
    s.obscuration = obscuration;
    s.validate();
    return s;
  }
};

struct BackendFlags {
  std::string backend = "bicubic";
  std::vector<std::string> weights;
  std::string adapter;
  int timeout_ms = 120000;
  std::vector<std::string> params;

  void add(CLI::App& app) {
    app.add_option("--backend", backend,
                   "nearest, bilinear, bicubic, lanczos3, edsr or external")
        ->capture_default_str();
    app.add_option("--weights", weights,
                   "EDSR weight file (repeat once per scale)");
    app.add_option("--adapter", adapter, "External adapter executable");
    app.add_option("--timeout-ms", timeout_ms, "External adapter timeout")
        ->capture_default_str();
    app.add_option("--param", params, "Adapter parameter key=value");
  }

  std::map<std::string, std::string> param_map() const {
    std::map<std::string, std::string> out;
    for (const std::string& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ValidationError("--param expects key=value, got '" + p + "'");
      out[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return out;
  }

  BackendRegistry registry() const {
    BackendRegistry registry = BackendRegistry::with_builtins();
    if (!weights.empty()) {
      EdsrBackend edsr;
      for (const std::string& path : weights) {
        const edsr::ModelConfig config = edsr::read_weight_config(path);
        auto model = std::make_shared<const edsr::Model>(
            config, edsr::load_weights(path, config));
        edsr.models[config.scale] = std::move(model);
      }
      registry.register_backend("edsr", std::move(edsr));
    }
    if (!adapter.empty()) {
      if (timeout_ms < 1) throw ValidationError("--timeout-ms must be positive");
      ExternalAdapter descriptor;
      descriptor.executable = adapter;
      descriptor.timeout = std::chrono::milliseconds(timeout_ms);
      descriptor.params = param_map();
      registry.register_backend("external", std::move(descriptor));
    }
    if (backend == "edsr" && weights.empty())
      throw ValidationError("--backend edsr requires --weights");
    if (backend == "external" && adapter.empty())
      throw ValidationError("--backend external requires --adapter");
    return registry;
  }
};

std::optional<ResampleKernel> kernel_flag(const std::string& text,
                                          const char* flag) {
  const auto kernel = parse_resample_kernel(text);
  if (!kernel)
    throw ValidationError(std::string(flag) + ": unknown resample kernel '" +
                          text + "'");
  return kernel;
}

// ---------------------------------------------------------------- degrade

struct DegradeArgs {
  std::string input;
  std::string output;
  double gsd_original = 0.6;
  std::optional<double> gsd_sensor;
  double gsd_product = 0.0;
  double grd = 0.0;
  double snr50 = 0.0;
  int bit = 8;
  std::uint64_t seed = 0;
  int out_bit = 16;
  std::string resample_down = "area";
  std::string resample_up = "bicubic";
  std::string boundary = "reflect";
  OpticsFlags optics;
};

void add_degrade(CLI::App& app, DegradeArgs& a) {
  app.add_option("--in", a.input, "Input PNG")->required();
  app.add_option("--out", a.output, "Output PNG")->required();
  app.add_option("--gsd-original,--gsd_original", a.gsd_original,
                 "Ground sampling distance of the input [m/px]")
      ->capture_default_str();
  app.add_option("--gsd-sensor,--gsd_sensor", a.gsd_sensor,
                 "Intermediate sensor GSD [m/px]; unset = product GSD");
  app.add_option("--gsd-product,--gsd_product", a.gsd_product,
                 "Product GSD [m/px]")
      ->required();
  app.add_option("--grd", a.grd, "Ground resolved distance [m]")->required();
  app.add_option("--snr50", a.snr50, "SNR at half dynamic range")->required();
  app.add_option("--bit", a.bit, "Sensor bit depth for the noise model")
      ->capture_default_str();
  app.add_option("--seed", a.seed, "RNG seed")->capture_default_str();
  app.add_option("--out-bit", a.out_bit, "Bit depth of the written PNG")
      ->capture_default_str();
  app.add_option("--resample-down,--resample_down", a.resample_down)
      ->capture_default_str();
  app.add_option("--resample-up,--resample_up", a.resample_up)
      ->capture_default_str();
  app.add_option("--boundary", a.boundary, "reflect or replicate")
      ->capture_default_str();
  a.optics.add(app);
}

int cmd_degrade(const DegradeArgs& a, int verbosity) {
  DegradeSpec spec;
  spec.gsd_original = a.gsd_original;
  spec.gsd_sensor = a.gsd_sensor;
  spec.gsd_product = a.gsd_product;
  spec.grd = a.grd;
  spec.snr50 = a.snr50;
  spec.bit = a.bit;
  spec.seed = a.seed;
  spec.resample_down = *kernel_flag(a.resample_down, "--resample-down");
  spec.resample_up = *kernel_flag(a.resample_up, "--resample-up");
  const auto boundary = parse_boundary(a.boundary);
  if (!boundary) throw ValidationError("--boundary: unknown mode '" + a.boundary + "'");
  spec.boundary = *boundary;
  spec.validate();
  if (a.out_bit != 8 && a.out_bit != 16)
    throw ValidationError("--out-bit must be 8 or 16");
  const OpticsSpec optics = a.optics.spec();

  const Raster input = load_raster(a.input, a.gsd_original);
  const DegradedRaster result = degrade(input, spec, optics);
  save_raster(result.raster, a.output, a.out_bit);

  json stages = json::array();
  for (const StageRecord& s : result.stage_log) {
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << s.checksum;
    stages.push_back({{"stage", s.name},
                      {"width", s.width},
                      {"height", s.height},
                      {"channels", s.channels},
                      {"checksum", hex.str()}});
    if (verbosity > 0)
      std::cerr << s.name << ": " << s.width << "x" << s.height << "x"
                << s.channels << " " << hex.str() << '\n';
  }
  json sidecar{{"input", a.input},
               {"gsd_original", spec.gsd_original},
               {"gsd_sensor", spec.effective_sensor_gsd()},
               {"gsd_product", spec.gsd_product},
               {"grd", spec.grd},
               {"snr50", spec.snr50},
               {"bit", spec.bit},
               {"seed", spec.seed},
               {"resample_down", std::string(to_string(spec.resample_down))},
               {"resample_up", std::string(to_string(spec.resample_up))},
               {"boundary", std::string(to_string(spec.boundary))},
               {"wavelength", optics.wavelength},
               {"altitude", optics.altitude},
               {"obscuration", optics.obscuration},
               {"stages", stages}};
  const fs::path sidecar_path = a.output + ".json";
  std::ofstream out(sidecar_path);
  out << sidecar.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + sidecar_path.string());
  std::cout << "wrote " << a.output << " (" << result.raster.width() << "x"
            << result.raster.height() << ")\n";
  return 0;
}

// ---------------------------------------------------------------- upscale

struct UpscaleArgs {
  std::string input;
  std::string output;
  int scale = 2;
  double gsd = 1.0;
  int out_bit = 16;
  BackendFlags backend;
};

void add_upscale(CLI::App& app, UpscaleArgs& a) {
  app.add_option("--in", a.input, "Input PNG")->required();
  app.add_option("--out", a.output, "Output PNG")->required();
  app.add_option("--scale", a.scale, "Upscale factor: 2, 3 or 4")
      ->capture_default_str();
  app.add_option("--gsd", a.gsd, "Input GSD [m/px]")->capture_default_str();
  app.add_option("--out-bit", a.out_bit, "Bit depth of the written PNG")
      ->capture_default_str();
  a.backend.add(app);
}

int cmd_upscale(const UpscaleArgs& a) {
  if (a.scale < 2 || a.scale > 4) throw ValidationError("--scale must be 2, 3 or 4");
  if (a.out_bit != 8 && a.out_bit != 16)
    throw ValidationError("--out-bit must be 8 or 16");
  const BackendRegistry registry = a.backend.registry();
  SrRequest request;
  request.input = load_raster(a.input, a.gsd);
  request.scale = a.scale;
  request.backend_id = a.backend.backend;
  request.params = a.backend.param_map();
  const SrResult result = registry.upscale(request);
  save_raster(result.output, a.output, a.out_bit);
  std::cout << "wrote " << a.output << " (" << result.output.width() << "x"
            << result.output.height() << ", " << result.backend_id << ", "
            << format_number(result.wall_time) << " s)\n";
  return 0;
}

// --------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string reference;
  std::string candidate;
  std::string csv;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  app.add_option("--reference", a.reference, "Reference PNG")->required();
  app.add_option("--candidate", a.candidate, "Candidate PNG")->required();
  app.add_option("--csv", a.csv, "Append the metric row to this CSV");
}

int cmd_evaluate(const EvaluateArgs& a) {
  const Raster reference = load_raster(a.reference, 1.0);
  Raster candidate = load_raster(a.candidate, 1.0);
  // Both files are taken to cover the same ground extent.
  candidate.set_gsd(static_cast<double>(reference.width()) / candidate.width());
  const Raster aligned = align_for_metric(candidate, reference);
  const MetricRecord m = evaluate(reference, aligned, a.reference, a.candidate);

  std::cout << "mse " << format_number(m.mse) << '\n'
            << "psnr_db " << format_number(m.psnr) << '\n'
            << "ssim_global " << format_number(m.ssim_global) << '\n'
            << "ssim_win11 " << format_number(m.ssim_windowed) << '\n';
  if (!a.csv.empty()) {
    const bool fresh = !fs::exists(a.csv) || fs::file_size(a.csv) == 0;
    std::ofstream out(a.csv, std::ios::app | std::ios::binary);
    if (!out) throw IoError("cannot append to " + a.csv);
    if (fresh) out << "reference,candidate,mse,psnr_db,ssim_global,ssim_win11\n";
    out << a.reference << ',' << a.candidate << ',' << format_number(m.mse)
        << ',' << format_number(m.psnr) << ',' << format_number(m.ssim_global)
        << ',' << format_number(m.ssim_windowed) << '\n';
    if (!out) throw IoError("failed writing " + a.csv);
  }
  return 0;
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
  std::string manifest;
  std::string output = "records.csv";
  std::vector<double> gsd{1.2, 1.8, 2.4};
  std::vector<double> grd{1.2, 1.55, 1.9, 2.25, 2.6};
  std::vector<double> snr50{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::optional<double> gsd_sensor;
  int bit = 8;
  std::uint64_t seed = 2021;
  int jobs = 0;
  CorpusOptions corpus;
  OpticsFlags optics;
  BackendFlags backend;
};

void add_sweep(CLI::App& app, SweepArgs& a) {
  app.add_option("--manifest", a.manifest,
                 "Dataset manifest; the bundled synthetic corpus when omitted");
  app.add_option("--out", a.output, "records.csv path")->capture_default_str();
  app.add_option("--gsd", a.gsd, "Product GSD values [m/px]")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--grd", a.grd, "GRD values [m]")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--snr50", a.snr50, "SNR50 values")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--gsd-sensor,--gsd_sensor", a.gsd_sensor,
                 "Intermediate sensor GSD [m/px]");
  app.add_option("--bit", a.bit)->capture_default_str();
  app.add_option("--seed", a.seed, "Global seed")->capture_default_str();
  app.add_option("--jobs", a.jobs,
                 "Worker threads (default: $TRADESCOPE_JOBS or 1)");
  app.add_option("--corpus-size", a.corpus.size)->capture_default_str();
  app.add_option("--crops-per-geography", a.corpus.crops_per_geography)
      ->capture_default_str();
  app.add_option("--corpus-seed", a.corpus.seed)->capture_default_str();
  a.optics.add(app);
  a.backend.add(app);
}

int cmd_sweep(const SweepArgs& a) {
  SweepConfig config;
  config.gsd_values = a.gsd;
  config.grd_values = a.grd;
  config.snr50_values = a.snr50;
  config.gsd_sensor = a.gsd_sensor;
  config.bit = a.bit;
  config.global_seed = a.seed;
  config.backend_id = a.backend.backend;
  config.jobs = a.jobs > 0 ? a.jobs : default_jobs();
  config.optics = a.optics.spec();
  config.validate();
  const BackendRegistry registry = a.backend.registry();

  std::vector<LabeledCrop> crops;
  if (a.manifest.empty()) {
    crops = synthetic_corpus(a.corpus);
  } else {
    crops = load_crops(load_manifest(a.manifest));
  }
  if (crops.empty()) throw ValidationError("no crops to sweep");

  const std::vector<RunRecord> records = run_sweep(crops, config, registry);
  export_records_csv(records, a.output);

  int failed = 0;
  for (const RunRecord& r : records) {
    if (r.ok) continue;
    if (++failed <= 5)
      std::cerr << "failed: " << to_string(r.geography) << " " << r.crop_id
                << " gsd=" << format_number(r.point.gsd_product)
                << " grd=" << format_number(r.point.grd)
                << " snr50=" << format_number(r.point.snr50) << ": " << r.error
                << '\n';
  }
  std::cout << records.size() << " runs (" << crops.size() << " crops x "
            << records.size() / crops.size() << " points), " << failed
            << " failed; wrote " << a.output << '\n';
  return failed == static_cast<int>(records.size()) ? kExitPipeline : 0;
}

// ----------------------------------------------------------------- report

struct ReportArgs {
  std::string records = "records.csv";
  std::string out_dir = ".";
  std::string figure = "all";
  std::string metric = "ssim_global";
  std::optional<double> snr50;
};

void add_report(CLI::App& app, ReportArgs& a) {
  app.add_option("--records", a.records, "records.csv from a sweep")
      ->capture_default_str();
  app.add_option("--out-dir", a.out_dir, "Where boxstats.csv / heatmap.csv go")
      ->capture_default_str();
  app.add_option("--figure", a.figure, "box, crop, heatmap or all")
      ->capture_default_str();
  app.add_option("--metric", a.metric, "ssim_global, ssim_win11, psnr_db or mse")
      ->capture_default_str();
  app.add_option("--snr50", a.snr50, "Heatmap slice (default: every SNR50)");
}

void print_heatmap(const HeatmapTable& t) {
  std::cout << "heatmap " << to_string(t.metric) << " snr50="
            << format_number(t.snr50) << " (rows gsd, columns grd)\n";
  std::cout << std::setw(8) << "gsd\\grd";
  for (double grd : t.grd_values) std::cout << std::setw(10) << format_number(grd);
  std::cout << '\n';
  for (std::size_t i = 0; i < t.gsd_values.size(); ++i) {
    std::cout << std::setw(8) << format_number(t.gsd_values[i]);
    for (std::size_t j = 0; j < t.grd_values.size(); ++j) {
      const auto cell = t.at(i, j);
      std::ostringstream s;
      if (cell) s << std::fixed << std::setprecision(4) << *cell;
      else s << "-";
      std::cout << std::setw(10) << s.str();
    }
    std::cout << '\n';
  }
}

void print_box(const std::vector<AggregateStats>& stats) {
  for (const AggregateStats& s : stats) {
    std::cout << to_string(s.group_by) << ' ';
    if (s.geography) std::cout << to_string(*s.geography) << ' ';
    if (s.crop_id) std::cout << "crop=" << *s.crop_id << ' ';
    if (s.gsd_product) std::cout << "gsd=" << format_number(*s.gsd_product) << ' ';
    std::cout << "median=" << format_number(s.stats.median)
              << " q1=" << format_number(s.stats.q1)
              << " q3=" << format_number(s.stats.q3)
              << " min=" << format_number(s.stats.min)
              << " max=" << format_number(s.stats.max) << " n=" << s.stats.n
              << '\n';
  }
}

int cmd_report(const ReportArgs& a) {
  const auto metric = parse_metric(a.metric);
  if (!metric) throw ValidationError("--metric: unknown metric '" + a.metric + "'");
  if (a.figure != "all" && a.figure != "box" && a.figure != "crop" &&
      a.figure != "heatmap")
    throw ValidationError("--figure must be box, crop, heatmap or all");
  const std::vector<RunRecord> records = import_records_csv(a.records);
  if (records.empty()) throw ValidationError(a.records + " holds no records");

  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  const fs::path dir = a.out_dir;
  std::size_t failed = 0;
  for (const RunRecord& r : records) failed += r.ok ? 0 : 1;
  std::cout << records.size() << " records, " << failed << " failed\n";

  if (a.figure == "all" || a.figure == "box" || a.figure == "crop") {
    std::vector<AggregateStats> all;
    for (GroupBy g : {GroupBy::GeographyGsd, GroupBy::GeographyCrop,
                      GroupBy::GsdGrdSnr}) {
      auto part = aggregate_boxstats(records, g, *metric);
      const bool shown = (a.figure == "box" && g == GroupBy::GeographyGsd) ||
                         (a.figure == "crop" && g == GroupBy::GeographyCrop) ||
                         (a.figure == "all" && g != GroupBy::GsdGrdSnr);
      if (shown) print_box(part);
      all.insert(all.end(), part.begin(), part.end());
    }
    export_boxstats_csv(all, dir / "boxstats.csv");
  }
  if (a.figure == "all" || a.figure == "heatmap") {
    const auto gsd = distinct_gsd(records);
    const auto grd = distinct_grd(records);
    std::vector<double> slices =
        a.snr50 ? std::vector<double>{*a.snr50} : distinct_snr50(records);
    std::vector<HeatmapTable> tables;
    for (double snr : slices) {
      tables.push_back(heatmap_table(records, *metric, snr, gsd, grd));
      print_heatmap(tables.back());
    }
    export_heatmap_csv(tables, dir / "heatmap.csv");
  }
  return 0;
}

// ----------------------------------------------------------------- corpus

struct CorpusArgs {
  std::string out_dir = "corpus";
  CorpusOptions options;
};

void add_corpus(CLI::App& app, CorpusArgs& a) {
  app.add_option("--out-dir", a.out_dir)->capture_default_str();
  app.add_option("--size", a.options.size)->capture_default_str();
  app.add_option("--gsd", a.options.gsd)->capture_default_str();
  app.add_option("--crops-per-geography", a.options.crops_per_geography)
      ->capture_default_str();
  app.add_option("--seed", a.options.seed)->capture_default_str();
}

int cmd_corpus(const CorpusArgs& a) {
  const DatasetManifest manifest = write_synthetic_corpus(a.out_dir, a.options);
  std::cout << "wrote " << manifest.entries.size() << " crops and "
            << (fs::path(a.out_dir) / "manifest.json").string() << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Trade-space simulator: degrade, super-resolve and score "
               "overhead imagery"};
  app.set_config("--config", "", "TOML/INI file mirroring the flags");
  app.require_subcommand(1);
  app.fallthrough();
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Verbose output");

  DegradeArgs degrade_args;
  UpscaleArgs upscale_args;
  EvaluateArgs evaluate_args;
  SweepArgs sweep_args;
  ReportArgs report_args;
  CorpusArgs corpus_args;
  auto* degrade_cmd = app.add_subcommand("degrade", "Degrade one image");
  add_degrade(*degrade_cmd, degrade_args);
  auto* upscale_cmd = app.add_subcommand("upscale", "Super-resolve one image");
  add_upscale(*upscale_cmd, upscale_args);
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a candidate image");
  add_evaluate(*evaluate_cmd, evaluate_args);
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the trade-space sweep");
  add_sweep(*sweep_cmd, sweep_args);
  auto* report_cmd = app.add_subcommand("report", "Aggregate sweep records");
  add_report(*report_cmd, report_args);
  auto* corpus_cmd =
      app.add_subcommand("corpus", "Write the bundled synthetic corpus");
  add_corpus(*corpus_cmd, corpus_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*degrade_cmd) return cmd_degrade(degrade_args, verbosity);
    if (*upscale_cmd) return cmd_upscale(upscale_args);
    if (*evaluate_cmd) return cmd_evaluate(evaluate_args);
    if (*sweep_cmd) return cmd_sweep(sweep_args);
    if (*report_cmd) return cmd_report(report_args);
    if (*corpus_cmd) return cmd_corpus(corpus_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
  return kExitValidation;
}

}  // namespace tradescope
