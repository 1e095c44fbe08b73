#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tradescope/degrade.hpp"
#include "tradescope/iqa.hpp"
#include "tradescope/manifest.hpp"
#include "tradescope/optics.hpp"
#include "tradescope/sr_backends.hpp"
#include "tradescope/stats.hpp"

namespace tradescope {

struct TradeSpacePoint {
  double gsd_product = 1.2;
  double grd = 1.2;
  double snr50 = 50.0;

  friend bool operator==(const TradeSpacePoint&,
                         const TradeSpacePoint&) = default;
};

struct SweepConfig {
  std::vector<double> gsd_values{1.2, 1.8, 2.4};
  std::vector<double> grd_values{1.2, 1.55, 1.9, 2.25, 2.6};
  std::vector<double> snr50_values{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::string backend_id = "bicubic";
  std::uint64_t global_seed = 2021;
  std::optional<double> gsd_sensor;
  int bit = 8;
  OpticsSpec optics;
  int jobs = 1;

  /// Lists nonempty, strictly increasing, positive.
  void validate() const;
};

struct RunRecord {
  Geography geography = Geography::Beach;
  int crop_id = 1;
  TradeSpacePoint point;
  int scale = 0;
  std::string backend;
  MetricRecord metrics;
  bool ok = false;
  std::uint64_t seed = 0;
  std::string error;  // empty when ok; not serialized
};

/// Cartesian product ordered by (gsd, grd, snr50).
std::vector<TradeSpacePoint> enumerate_points(const SweepConfig& config);

/// Order-independent seed of one (crop, point) run:
/// mix(global_seed, gsd_product, grd, snr50, crop_id).
std::uint64_t derive_seed(std::uint64_t global_seed,
                          const TradeSpacePoint& point, int crop_id);

/// degrade -> upscale -> align -> metrics against the original crop. Errors
/// become a record with ok == false.
RunRecord run_point(const LabeledCrop& crop, const TradeSpacePoint& point,
                    const SweepConfig& config,
                    const BackendRegistry& registry);

/// Every (crop, point) pair, executed on up to config.jobs threads and
/// returned in canonical (geography, crop_id, gsd, grd, snr50) order.
std::vector<RunRecord> run_sweep(const std::vector<LabeledCrop>& crops,
                                 const SweepConfig& config,
                                 const BackendRegistry& registry);

void sort_canonical(std::vector<RunRecord>& records);

enum class Metric { Psnr, SsimGlobal, SsimWindowed, Mse };

std::string_view to_string(Metric metric) noexcept;
std::optional<Metric> parse_metric(std::string_view text) noexcept;
double metric_value(const RunRecord& record, Metric metric) noexcept;

/// Grouping keys: geography x gsd (box plots over snr50), geography x crop,
/// and gsd x grd x snr50 (heatmap cells).
enum class GroupBy { GeographyGsd, GeographyCrop, GsdGrdSnr };

std::string_view to_string(GroupBy group_by) noexcept;
std::optional<GroupBy> parse_group_by(std::string_view text) noexcept;

struct AggregateStats {
  GroupBy group_by = GroupBy::GeographyGsd;
  Metric metric = Metric::SsimGlobal;
  std::optional<Geography> geography;
  std::optional<int> crop_id;
  std::optional<double> gsd_product;
  std::optional<double> grd;
  std::optional<double> snr50;
  BoxStats stats;
};

/// One AggregateStats per group, failed records excluded; ordered by key.
/// Throws ValidationError when no ok record remains.
std::vector<AggregateStats> aggregate_boxstats(
    const std::vector<RunRecord>& records, GroupBy group_by, Metric metric);

struct HeatmapTable {
  Metric metric = Metric::SsimGlobal;
  double snr50 = 0.0;
  std::vector<double> gsd_values;  // rows
  std::vector<double> grd_values;  // columns
  std::vector<std::optional<double>> medians;  // row-major; nullopt = empty

  std::optional<double> at(std::size_t gsd_index,
                           std::size_t grd_index) const {
    return medians[gsd_index * grd_values.size() + grd_index];
  }
};

/// Median metric per (gsd, grd) cell at one snr50. Throws ValidationError if
/// no record carries that snr50.
HeatmapTable heatmap_table(const std::vector<RunRecord>& records,
                           Metric metric, double snr50,
                           const std::vector<double>& gsd_values,
                           const std::vector<double>& grd_values);

/// Cell-wise plateau deltas: d1 = low->mid gain, d2 = mid->high gain.
struct PlateauTable {
  double snr_low = 10, snr_mid = 50, snr_high = 100;
  std::vector<double> gsd_values;
  std::vector<double> grd_values;
  std::vector<std::optional<double>> delta_low_mid;
  std::vector<std::optional<double>> delta_mid_high;
};

PlateauTable plateau_table(const std::vector<RunRecord>& records,
                           Metric metric,
                           const std::vector<double>& gsd_values,
                           const std::vector<double>& grd_values,
                           double snr_low = 10, double snr_mid = 50,
                           double snr_high = 100);

/// Distinct values of one axis present in the records, ascending.
std::vector<double> distinct_gsd(const std::vector<RunRecord>& records);
std::vector<double> distinct_grd(const std::vector<RunRecord>& records);
std::vector<double> distinct_snr50(const std::vector<RunRecord>& records);

}  // namespace tradescope
