// Test adapter speaking the job/status file protocol. params.mode selects
// the behaviour: echo (bicubic upscale), sleep, bad_dims, fail, no_status,
// not_ok. params.trace, when set, receives the job.json path.
#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <json.hpp>

#include "tradescope/raster.hpp"
#include "tradescope/resample.hpp"

using json = nlohmann::json;

namespace {

void write_status(const std::string& path, bool ok, const std::string& message,
                  double wall_time) {
  std::ofstream out(path);
  out << json{{"ok", ok}, {"message", message}, {"wall_time", wall_time}}.dump();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: echo_adapter job.json\n";
    return 64;
  }
  const auto start = std::chrono::steady_clock::now();
  json job;
  try {
    std::ifstream in(argv[1]);
    job = json::parse(in);
  } catch (const std::exception& e) {
    std::cerr << "bad job: " << e.what() << '\n';
    return 65;
  }
  const json params = job.value("params", json::object());
  const std::string mode = params.value("mode", std::string("echo"));
  const std::string status = job.at("status_path").get<std::string>();
  if (params.contains("trace")) std::ofstream(params["trace"].get<std::string>()) << argv[1];

  if (mode == "sleep") {
    std::this_thread::sleep_for(std::chrono::seconds(30));
    return 0;
  }
  if (mode == "fail") {
    write_status(status, false, "induced failure", 0.0);
    return 3;
  }
  if (mode == "no_status") return 0;

  const int scale = job.at("scale").get<int>();
  const tradescope::Raster input =
      tradescope::load_raster(job.at("input_path").get<std::string>());
  const int factor = mode == "bad_dims" ? scale - 1 : scale;
  const tradescope::Raster output = tradescope::clamp_unit(tradescope::resize(
      input, input.width() * factor, input.height() * factor,
      tradescope::ResampleKernel::Bicubic));
  tradescope::save_raster(output, job.at("output_path").get<std::string>(), 16);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_status(status, mode != "not_ok", mode == "not_ok" ? "declined" : "", elapsed);
  return 0;
}
