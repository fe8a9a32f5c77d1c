#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace hm::cli {

using Json = nlohmann::ordered_json;

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Record of one CLI run: the resolved parameters plus the hash of every file
/// read and written. Paths are stored by file name only, so the document does
/// not depend on where the run happened.
class Manifest {
 public:
  explicit Manifest(std::string command);

  Json& params() { return params_; }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);

  Json to_json() const;
  /// Writes `<dir>/<command>.manifest.json` and returns its path.
  std::filesystem::path write(const std::filesystem::path& dir) const;

 private:
  std::string command_;
  Json params_ = Json::object();
  std::vector<std::filesystem::path> inputs_;
  std::vector<std::filesystem::path> outputs_;
};

}  // namespace hm::cli
