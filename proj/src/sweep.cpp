#include "tradescope/sweep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>

#include "tradescope/error.hpp"
#include "tradescope/noise.hpp"

namespace tradescope {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same_value(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
}

void check_axis(const std::vector<double>& values, const char* name) {
  if (values.empty()) throw ValidationError(std::string(name) + " must not be empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw ValidationError(std::string(name) + " values must be positive");
    if (i > 0 && !(values[i] > values[i - 1]))
      throw ValidationError(std::string(name) + " must be strictly increasing");
  }
}

std::vector<double> distinct(const std::vector<RunRecord>& records,
                             double TradeSpacePoint::*field) {
  std::vector<double> values;
  for (const RunRecord& r : records) {
    const double v = r.point.*field;
    if (std::none_of(values.begin(), values.end(),
                     [v](double u) { return same_value(u, v); }))
      values.push_back(v);
  }
  std::sort(values.begin(), values.end());
  return values;
}

std::optional<std::size_t> find_index(const std::vector<double>& axis, double v) {
  for (std::size_t i = 0; i < axis.size(); ++i)
    if (same_value(axis[i], v)) return i;
  return std::nullopt;
}

}  // namespace

void SweepConfig::validate() const {
  check_axis(gsd_values, "gsd_values");
  check_axis(grd_values, "grd_values");
  check_axis(snr50_values, "snr50_values");
  if (backend_id.empty()) throw ValidationError("backend must be named");
  if (gsd_sensor && !(*gsd_sensor > 0.0))
    throw ValidationError("gsd_sensor must be positive");
  if (bit != 8 && bit != 16) throw ValidationError("bit must be 8 or 16");
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
  if (!(optics.wavelength > 0.0) || !(optics.altitude > 0.0) ||
      !(optics.obscuration >= 0.0 && optics.obscuration < 1.0))
    throw ValidationError("invalid optics parameters");
}

std::vector<TradeSpacePoint> enumerate_points(const SweepConfig& config) {
  config.validate();
  std::vector<TradeSpacePoint> points;
  points.reserve(config.gsd_values.size() * config.grd_values.size() *
                 config.snr50_values.size());
  for (double gsd : config.gsd_values)
    for (double grd : config.grd_values)
      for (double snr : config.snr50_values) points.push_back({gsd, grd, snr});
  return points;
}

std::uint64_t derive_seed(std::uint64_t global_seed,
                          const TradeSpacePoint& point, int crop_id) {
  std::uint64_t s = mix_seed(global_seed, std::bit_cast<std::uint64_t>(point.gsd_product));
  s = mix_seed(s, std::bit_cast<std::uint64_t>(point.grd));
  s = mix_seed(s, std::bit_cast<std::uint64_t>(point.snr50));
  return mix_seed(s, static_cast<std::uint64_t>(crop_id));
}

RunRecord run_point(const LabeledCrop& crop, const TradeSpacePoint& point,
                    const SweepConfig& config,
                    const BackendRegistry& registry) {
  RunRecord record;
  record.geography = crop.geography;
  record.crop_id = crop.crop_id;
  record.point = point;
  record.backend = config.backend_id;
  record.seed = derive_seed(config.global_seed, point, crop.crop_id);
  record.metrics.mse = record.metrics.psnr = kNaN;
  record.metrics.ssim_global = record.metrics.ssim_windowed = kNaN;
  try {
    record.scale = select_scale(point.gsd_product, crop.raster.gsd());
    DegradeSpec spec;
    spec.gsd_original = crop.raster.gsd();
    spec.gsd_sensor = config.gsd_sensor;
    spec.gsd_product = point.gsd_product;
    spec.grd = point.grd;
    spec.snr50 = point.snr50;
    spec.bit = config.bit;
    spec.seed = record.seed;
    const DegradedRaster degraded = degrade(crop.raster, spec, config.optics);

    SrRequest request;
    request.input = degraded.raster;
    request.scale = record.scale;
    request.backend_id = config.backend_id;
    const SrResult sr = registry.upscale(request);

    const Raster aligned = align_for_metric(sr.output, crop.raster);
    const std::string ref_id = std::string(to_string(crop.geography)) + "_" +
                               std::to_string(crop.crop_id);
    record.metrics = evaluate(crop.raster, aligned, ref_id,
                              ref_id + "@" + std::to_string(record.seed));
    record.ok = true;
  } catch (const std::exception& e) {
    record.ok = false;
    record.error = e.what();
  }
  return record;
}

void sort_canonical(std::vector<RunRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const RunRecord& a, const RunRecord& b) {
                     return std::tie(a.geography, a.crop_id, a.point.gsd_product,
                                     a.point.grd, a.point.snr50) <
                            std::tie(b.geography, b.crop_id, b.point.gsd_product,
                                     b.point.grd, b.point.snr50);
                   });
}

std::vector<RunRecord> run_sweep(const std::vector<LabeledCrop>& crops,
                                 const SweepConfig& config,
                                 const BackendRegistry& registry) {
  const auto points = enumerate_points(config);
  if (!registry.contains(config.backend_id))
    throw BackendError(BackendFailure::UnknownBackend,
                       "unknown backend '" + config.backend_id + "'");
  const long tasks = static_cast<long>(crops.size() * points.size());
  std::vector<RunRecord> records(static_cast<std::size_t>(tasks));
#pragma omp parallel for schedule(dynamic) num_threads(config.jobs)
  for (long t = 0; t < tasks; ++t) {
    const auto& crop = crops[static_cast<std::size_t>(t) / points.size()];
    const auto& point = points[static_cast<std::size_t>(t) % points.size()];
    records[static_cast<std::size_t>(t)] = run_point(crop, point, config, registry);
  }
  sort_canonical(records);
  return records;
}

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::Psnr: return "psnr_db";
    case Metric::SsimGlobal: return "ssim_global";
    case Metric::SsimWindowed: return "ssim_win11";
    case Metric::Mse: return "mse";
  }
  return "ssim_global";
}

std::optional<Metric> parse_metric(std::string_view text) noexcept {
  for (Metric m : {Metric::Psnr, Metric::SsimGlobal, Metric::SsimWindowed, Metric::Mse})
    if (to_string(m) == text) return m;
  if (text == "psnr") return Metric::Psnr;
  if (text == "ssim") return Metric::SsimGlobal;
  return std::nullopt;
}

double metric_value(const RunRecord& record, Metric metric) noexcept {
  switch (metric) {
    case Metric::Psnr: return record.metrics.psnr;
    case Metric::SsimGlobal: return record.metrics.ssim_global;
    case Metric::SsimWindowed: return record.metrics.ssim_windowed;
    case Metric::Mse: return record.metrics.mse;
  }
  return kNaN;
}

std::string_view to_string(GroupBy group_by) noexcept {
  switch (group_by) {
    case GroupBy::GeographyGsd: return "geography_gsd";
    case GroupBy::GeographyCrop: return "geography_crop";
    case GroupBy::GsdGrdSnr: return "gsd_grd_snr50";
  }
  return "geography_gsd";
}

std::optional<GroupBy> parse_group_by(std::string_view text) noexcept {
  for (GroupBy g : {GroupBy::GeographyGsd, GroupBy::GeographyCrop, GroupBy::GsdGrdSnr})
    if (to_string(g) == text) return g;
  return std::nullopt;
}

std::vector<AggregateStats> aggregate_boxstats(
    const std::vector<RunRecord>& records, GroupBy group_by, Metric metric) {
  // Key: (geography, crop_id, gsd, grd, snr50); unused parts stay at -1.
  using Key = std::tuple<int, int, double, double, double>;
  std::map<Key, std::vector<double>> groups;
  for (const RunRecord& r : records) {
    if (!r.ok) continue;
    const double v = metric_value(r, metric);
    if (std::isnan(v)) continue;
    Key key{-1, -1, -1.0, -1.0, -1.0};
    switch (group_by) {
      case GroupBy::GeographyGsd:
        key = {static_cast<int>(r.geography), -1, r.point.gsd_product, -1.0, -1.0};
        break;
      case GroupBy::GeographyCrop:
        key = {static_cast<int>(r.geography), r.crop_id, -1.0, -1.0, -1.0};
        break;
      case GroupBy::GsdGrdSnr:
        key = {-1, -1, r.point.gsd_product, r.point.grd, r.point.snr50};
        break;
    }
    groups[key].push_back(v);
  }
  if (groups.empty())
    throw ValidationError("no successful records to aggregate");

  std::vector<AggregateStats> out;
  for (const auto& [key, values] : groups) {
    AggregateStats s;
    s.group_by = group_by;
    s.metric = metric;
    const auto [geo, crop, gsd, grd, snr] = key;
    if (geo >= 0) s.geography = static_cast<Geography>(geo);
    if (crop >= 0) s.crop_id = crop;
    if (gsd >= 0) s.gsd_product = gsd;
    if (grd >= 0) s.grd = grd;
    if (snr >= 0) s.snr50 = snr;
    s.stats = box_stats(values);
    out.push_back(s);
  }
  return out;
}

HeatmapTable heatmap_table(const std::vector<RunRecord>& records,
                           Metric metric, double snr50,
                           const std::vector<double>& gsd_values,
                           const std::vector<double>& grd_values) {
  HeatmapTable table;
  table.metric = metric;
  table.snr50 = snr50;
  table.gsd_values = gsd_values;
  table.grd_values = grd_values;
  std::vector<std::vector<double>> cells(gsd_values.size() * grd_values.size());
  bool slice_present = false;
  for (const RunRecord& r : records) {
    if (!same_value(r.point.snr50, snr50)) continue;
    slice_present = true;
    if (!r.ok) continue;
    const auto gi = find_index(gsd_values, r.point.gsd_product);
    const auto ri = find_index(grd_values, r.point.grd);
    if (!gi || !ri) continue;
    const double v = metric_value(r, metric);
    if (!std::isnan(v)) cells[*gi * grd_values.size() + *ri].push_back(v);
  }
  if (!slice_present)
    throw ValidationError("no records at snr50 = " + std::to_string(snr50));
  table.medians.resize(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!cells[i].empty()) table.medians[i] = box_stats(cells[i]).median;
  return table;
}

PlateauTable plateau_table(const std::vector<RunRecord>& records,
                           Metric metric,
                           const std::vector<double>& gsd_values,
                           const std::vector<double>& grd_values,
                           double snr_low, double snr_mid, double snr_high) {
  const HeatmapTable low = heatmap_table(records, metric, snr_low, gsd_values, grd_values);
  const HeatmapTable mid = heatmap_table(records, metric, snr_mid, gsd_values, grd_values);
  const HeatmapTable high = heatmap_table(records, metric, snr_high, gsd_values, grd_values);
  PlateauTable table;
  table.snr_low = snr_low;
  table.snr_mid = snr_mid;
  table.snr_high = snr_high;
  table.gsd_values = gsd_values;
  table.grd_values = grd_values;
  const std::size_t n = low.medians.size();
  table.delta_low_mid.resize(n);
  table.delta_mid_high.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (low.medians[i] && mid.medians[i])
      table.delta_low_mid[i] = *mid.medians[i] - *low.medians[i];
    if (mid.medians[i] && high.medians[i])
      table.delta_mid_high[i] = *high.medians[i] - *mid.medians[i];
  }
  return table;
}

std::vector<double> distinct_gsd(const std::vector<RunRecord>& records) {
  return distinct(records, &TradeSpacePoint::gsd_product);
}
std::vector<double> distinct_grd(const std::vector<RunRecord>& records) {
  return distinct(records, &TradeSpacePoint::grd);
}
std::vector<double> distinct_snr50(const std::vector<RunRecord>& records) {
  return distinct(records, &TradeSpacePoint::snr50);
}

}  // namespace tradescope
