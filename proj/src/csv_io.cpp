#include "tradescope/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "tradescope/error.hpp"

namespace tradescope {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

template <typename T>
std::string optional_field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_same_v<T, double>) return format_number(*v);
  else return std::to_string(*v);
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

double parse_number(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw ValidationError("not a number: '" + text + "'");
  return v;
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kRecordColumns << '\n';
  for (const RunRecord& r : records) {
    out << to_string(r.geography) << ',' << r.crop_id << ','
        << format_number(r.point.gsd_product) << ',' << format_number(r.point.grd)
        << ',' << format_number(r.point.snr50) << ',' << r.scale << ','
        << r.backend << ',' << format_number(r.metrics.mse) << ','
        << format_number(r.metrics.psnr) << ','
        << format_number(r.metrics.ssim_global) << ','
        << format_number(r.metrics.ssim_windowed) << ','
        << (r.ok ? "ok" : "failed") << ',' << r.seed << '\n';
  }
}

void export_records_csv(const std::vector<RunRecord>& records,
                        const std::filesystem::path& path) {
  auto out = open_out(path);
  write_records_csv(out, records);
  finish(out, path);
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("records csv is empty");
  if (line != kRecordColumns)
    throw ValidationError("records csv header does not match the schema");
  std::vector<RunRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 13)
      throw ValidationError("records csv line " + std::to_string(line_no) +
                            ": expected 13 fields, got " + std::to_string(f.size()));
    RunRecord r;
    const auto geography = parse_geography(f[0]);
    if (!geography)
      throw ValidationError("records csv line " + std::to_string(line_no) +
                            ": unknown geography '" + f[0] + "'");
    r.geography = *geography;
    try {
      r.crop_id = std::stoi(f[1]);
      r.scale = std::stoi(f[5]);
      r.seed = std::stoull(f[12]);
    } catch (const std::exception&) {
      throw ValidationError("records csv line " + std::to_string(line_no) +
                            ": malformed integer field");
    }
    r.point = {parse_number(f[2]), parse_number(f[3]), parse_number(f[4])};
    r.backend = f[6];
    r.metrics.mse = parse_number(f[7]);
    r.metrics.psnr = parse_number(f[8]);
    r.metrics.ssim_global = parse_number(f[9]);
    r.metrics.ssim_windowed = parse_number(f[10]);
    if (f[11] != "ok" && f[11] != "failed")
      throw ValidationError("records csv line " + std::to_string(line_no) +
                            ": status must be ok or failed");
    r.ok = f[11] == "ok";
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<RunRecord> import_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_records_csv(in);
}

void write_boxstats_csv(std::ostream& out,
                        const std::vector<AggregateStats>& stats) {
  out << "group_by,metric,geography,crop_id,gsd_product,grd,snr50,n,min,q1,"
         "median,q3,max\n";
  for (const AggregateStats& s : stats) {
    out << to_string(s.group_by) << ',' << to_string(s.metric) << ','
        << (s.geography ? std::string(to_string(*s.geography)) : std::string())
        << ',' << optional_field(s.crop_id) << ','
        << optional_field(s.gsd_product) << ',' << optional_field(s.grd) << ','
        << optional_field(s.snr50) << ',' << s.stats.n << ','
        << format_number(s.stats.min) << ',' << format_number(s.stats.q1) << ','
        << format_number(s.stats.median) << ',' << format_number(s.stats.q3)
        << ',' << format_number(s.stats.max) << '\n';
  }
}

void export_boxstats_csv(const std::vector<AggregateStats>& stats,
                         const std::filesystem::path& path) {
  auto out = open_out(path);
  write_boxstats_csv(out, stats);
  finish(out, path);
}

void write_heatmap_csv(std::ostream& out, const std::vector<HeatmapTable>& tables) {
  out << "metric,snr50,gsd_product,grd,median\n";
  for (const HeatmapTable& t : tables) {
    for (std::size_t i = 0; i < t.gsd_values.size(); ++i) {
      for (std::size_t j = 0; j < t.grd_values.size(); ++j) {
        const auto cell = t.at(i, j);
        out << to_string(t.metric) << ',' << format_number(t.snr50) << ','
            << format_number(t.gsd_values[i]) << ','
            << format_number(t.grd_values[j]) << ','
            << (cell ? format_number(*cell) : std::string()) << '\n';
      }
    }
  }
}

void export_heatmap_csv(const std::vector<HeatmapTable>& tables,
                        const std::filesystem::path& path) {
  auto out = open_out(path);
  write_heatmap_csv(out, tables);
  finish(out, path);
}

}  // namespace tradescope
