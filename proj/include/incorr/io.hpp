#pragma once

// JSON persistence. Documents are versioned by a top-level "schema" member:
//   incorr-dataset/1   contacts and cross-bed measurements
//   incorr-project/1   dataset + logs + panel
// Numbers are written with 9 significant digits, members in a fixed order,
// so saving a loaded canonical document reproduces it byte for byte.
// Derived members (reference planes, true heights, trees, phi) are written
// for readers but recomputed on load; disagreement yields a warning.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "incorr/error.hpp"
#include "incorr/layout.hpp"
#include "incorr/model.hpp"
#include "incorr/project.hpp"
#include "incorr/render.hpp"

namespace incorr {

inline constexpr std::string_view kDatasetSchema = "incorr-dataset/1";
inline constexpr std::string_view kProjectSchema = "incorr-project/1";

using Json = nlohmann::ordered_json;

// Raised with ErrorCode::ValidationError; carries every error finding.
class ValidationFailure : public Error {
 public:
  explicit ValidationFailure(std::vector<Finding> findings);
  const std::vector<Finding>& findings() const noexcept { return findings_; }

 private:
  std::vector<Finding> findings_;
};

// Rounds to 9 significant digits (and turns -0 into 0).
double round_sig9(double v);

Dataset load_dataset(std::string_view bytes);
Dataset load_dataset(std::string_view bytes, std::vector<Finding>& warnings);
std::string save_dataset(const Dataset& dataset);

struct LoadedProject {
  Project project;
  std::vector<Finding> warnings;
};

LoadedProject load_project(std::string_view bytes);
std::string save_project(const Project& project);

// Building blocks shared with the HTTP API.
Json dataset_to_json(const Dataset& dataset);
Json project_to_json(const Project& project);
Json log_to_json(const GeoLog& log);
Json tree_to_json(const Stratum& s);
Json correlation_to_json(const Correlation& c);
Json plane_to_json(const Plane& plane);
Json dip_strike_to_json(const DipStrike& ds);
Json strip_to_json(const OutcropStrip& strip);
Json vec_to_json(Vec3 v);

// Typed access to request bodies; failures raise SchemaError naming the
// JSON pointer of the offending member.
class JsonReader {
 public:
  JsonReader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {}

  const Json& node() const { return node_; }
  const std::string& path() const { return path_; }

  bool has(std::string_view key) const;
  bool is_null(std::string_view key) const;
  JsonReader at(std::string_view key) const;
  JsonReader at(std::size_t index) const;
  std::size_t size() const;  // requires an array

  std::string string(std::string_view key) const;
  double number(std::string_view key) const;
  long long integer(std::string_view key) const;
  bool boolean(std::string_view key) const;
  Vec3 vec3(std::string_view key) const;
  std::vector<Vec3> vec3_list(std::string_view key) const;
  std::vector<std::string> string_list(std::string_view key) const;
  Rgb color(std::string_view key) const;

  Vec3 as_vec3() const;
  std::string as_string() const;

  [[noreturn]] void fail(const std::string& what) const;

 private:
  const Json& node_;
  std::string path_;
};

Json parse_json(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace incorr
