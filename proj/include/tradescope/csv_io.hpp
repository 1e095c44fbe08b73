#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tradescope/sweep.hpp"

namespace tradescope {

/// "%.9g", with "inf" / "-inf" / "nan" for non-finite values.
std::string format_number(double value);
double parse_number(const std::string& text);

inline constexpr const char* kRecordColumns =
    "geography,crop_id,gsd_product,grd,snr50,scale,backend,mse,psnr_db,"
    "ssim_global,ssim_win11,status,seed";

void write_records_csv(std::ostream& out,
                       const std::vector<RunRecord>& records);
void export_records_csv(const std::vector<RunRecord>& records,
                        const std::filesystem::path& path);

std::vector<RunRecord> read_records_csv(std::istream& in);
std::vector<RunRecord> import_records_csv(const std::filesystem::path& path);

void write_boxstats_csv(std::ostream& out,
                        const std::vector<AggregateStats>& stats);
void export_boxstats_csv(const std::vector<AggregateStats>& stats,
                         const std::filesystem::path& path);

/// Long format: metric, snr50, gsd_product, grd, median (empty when the
/// cell has no records).
void write_heatmap_csv(std::ostream& out,
                       const std::vector<HeatmapTable>& tables);
void export_heatmap_csv(const std::vector<HeatmapTable>& tables,
                        const std::filesystem::path& path);

}  // namespace tradescope
