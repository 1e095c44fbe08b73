#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <system_error>
#include <thread>

#include <json.hpp>

#include "tradescope/error.hpp"
#include "tradescope/sr_backends.hpp"

extern char** environ;

namespace tradescope {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

class Workspace {
 public:
  Workspace() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    const fs::path base = fs::temp_directory_path();
    for (int attempt = 0; attempt < 16; ++attempt) {
      const fs::path candidate =
          base / ("tradescope-sr-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter++) + "-" + std::to_string(rd()));
      std::error_code ec;
      if (fs::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw IoError("cannot create adapter workspace under " + base.string());
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const fs::path& path() const noexcept { return path_; }

 private:
  fs::path path_;
};

[[noreturn]] void fail(BackendFailure failure, const std::string& what) {
  throw BackendError(failure, "external adapter: " + what);
}

std::string read_status_message(const fs::path& status_path) {
  std::ifstream in(status_path);
  if (!in) return {};
  try {
    const json status = json::parse(in);
    return status.value("message", std::string{});
  } catch (const json::exception&) {
    return {};
  }
}

// Returns the wait status, or nullopt after killing the process group on
// timeout.
std::optional<int> wait_with_timeout(pid_t pid,
                                     std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  auto pause = std::chrono::microseconds(200);
  for (;;) {
    int status = 0;
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) return status;
    if (done < 0 && errno != EINTR) fail(BackendFailure::Spawn, "waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      return std::nullopt;
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::microseconds(20000));
  }
}

}  // namespace

SrResult external_upscale(const SrRequest& request,
                          const ExternalAdapter& adapter) {
  if (request.scale < 2 || request.scale > 4)
    throw BackendError(BackendFailure::UnsupportedScale,
                       "scale must be 2, 3 or 4");
  std::error_code ec;
  if (!fs::is_regular_file(adapter.executable, ec))
    fail(BackendFailure::Spawn,
         "executable not found: " + adapter.executable.string());

  const auto start = std::chrono::steady_clock::now();
  Workspace workspace;
  const fs::path input = workspace.path() / "input.png";
  const fs::path output = workspace.path() / "output.png";
  const fs::path status_path = workspace.path() / "status.json";
  const fs::path job_path = workspace.path() / "job.json";

  save_raster(clamp_unit(request.input), input, 16);
  {
    json params = json::object();
    for (const auto& [key, value] : adapter.params) params[key] = value;
    const json job{{"input_path", input.string()},
                   {"output_path", output.string()},
                   {"status_path", status_path.string()},
                   {"scale", request.scale},
                   {"params", params}};
    std::ofstream out(job_path);
    out << job.dump(2) << '\n';
    if (!out) throw IoError("cannot write job descriptor " + job_path.string());
  }

  const std::string exe = adapter.executable.string();
  const std::string job_arg = job_path.string();
  char* argv[] = {const_cast<char*>(exe.c_str()),
                  const_cast<char*>(job_arg.c_str()), nullptr};
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);
  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, exe.c_str(), nullptr, &attr, argv, environ);
  posix_spawnattr_destroy(&attr);
  if (rc != 0)
    fail(BackendFailure::Spawn,
         "cannot start " + exe + ": " + std::generic_category().message(rc));

  const auto status = wait_with_timeout(pid, adapter.timeout);
  if (!status)
    fail(BackendFailure::Timeout,
         exe + " exceeded " + std::to_string(adapter.timeout.count()) + " ms");
  if (!WIFEXITED(*status) || WEXITSTATUS(*status) != 0) {
    std::string detail = WIFEXITED(*status)
                             ? "exit code " + std::to_string(WEXITSTATUS(*status))
                             : "killed by signal " + std::to_string(WTERMSIG(*status));
    const std::string message = read_status_message(status_path);
    if (!message.empty()) detail += ": " + message;
    fail(BackendFailure::NonzeroExit, detail);
  }

  json status_doc;
  {
    std::ifstream in(status_path);
    if (!in) fail(BackendFailure::Protocol, "no status descriptor written");
    try {
      status_doc = json::parse(in);
    } catch (const json::exception& e) {
      fail(BackendFailure::Protocol, std::string("malformed status: ") + e.what());
    }
  }
  if (!status_doc.is_object() || !status_doc.contains("ok") ||
      !status_doc["ok"].is_boolean())
    fail(BackendFailure::Protocol, "status descriptor lacks a boolean 'ok'");
  if (!status_doc["ok"].get<bool>())
    fail(BackendFailure::Protocol,
         "adapter reported failure with exit 0: " +
             status_doc.value("message", std::string{}));
  if (!fs::exists(output)) fail(BackendFailure::Protocol, "no output image written");

  Raster result;
  try {
    result = load_raster(output, request.input.gsd() / request.scale);
  } catch (const Error& e) {
    fail(BackendFailure::Protocol, std::string("unreadable output: ") + e.what());
  }
  if (result.width() != request.input.width() * request.scale ||
      result.height() != request.input.height() * request.scale ||
      result.channels() != request.input.channels())
    fail(BackendFailure::DimsViolation,
         "output is " + std::to_string(result.width()) + "x" +
             std::to_string(result.height()) + "x" +
             std::to_string(result.channels()) + ", expected " +
             std::to_string(request.input.width() * request.scale) + "x" +
             std::to_string(request.input.height() * request.scale) + "x" +
             std::to_string(request.input.channels()));

  SrResult sr;
  sr.output = std::move(result);
  sr.backend_id = request.backend_id;
  sr.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return sr;
}

}  // namespace tradescope
