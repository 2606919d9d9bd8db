#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "incorr/error.hpp"
#include "incorr/model.hpp"

namespace httplib {
class Server;
}

namespace incorr {

// Single-writer project state. Readers take an immutable snapshot; each
// mutation runs under the writer lock, bumps the revision and publishes a new
// snapshot. When a persistence path is set, the project file is rewritten
// before the new snapshot becomes visible.
class ProjectService {
 public:
  struct Snapshot {
    std::shared_ptr<const Project> project;
    std::uint64_t revision = 0;
  };

  explicit ProjectService(Project initial, std::optional<std::filesystem::path> persist_path = std::nullopt);

  Snapshot snapshot() const;

  // Throws Error(StaleRevision) when expected_revision is set and differs.
  Snapshot mutate(const std::function<Project(const Project&)>& edit,
                  std::optional<std::uint64_t> expected_revision = std::nullopt);

  std::string panel_svg() const;

 private:
  struct State {
    std::shared_ptr<const Project> project;
    std::uint64_t revision = 0;
  };

  std::optional<std::filesystem::path> persist_path_;
  mutable std::mutex publish_mutex_;
  std::mutex writer_mutex_;
  State state_;
};

// HTTP status for a library error code.
int http_status(ErrorCode code);

// Registers the JSON API under /api and, when ui_dir is given, the UI's
// static files at /.
void install_routes(httplib::Server& server, ProjectService& service,
                    const std::optional<std::filesystem::path>& ui_dir = std::nullopt);

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = ".";
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> ui_dir;
};

// Loads <data_dir>/project.json (or starts from `dataset`) and blocks serving.
int serve(const ServeOptions& options);

}  // namespace incorr
