#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "headmotion/error.hpp"
#include "headmotion/mlp.hpp"

namespace hm {

enum class ModelLoadErrorKind { parse_error, version_mismatch, dimension_mismatch, non_finite };

/// Raised by load_model. The message starts with the kind ("parse error",
/// "version mismatch", "dimension mismatch", "non-finite value").
class ModelLoadError : public DataError {
 public:
  ModelLoadError(ModelLoadErrorKind kind, const std::string& detail);
  ModelLoadErrorKind kind() const noexcept { return kind_; }

 private:
  ModelLoadErrorKind kind_;
};

// Model JSON, format_version 1. Field reference lives in docs/model_format.md.
void save_model(std::ostream& out, const MlpModel& model);
void save_model(const std::filesystem::path& path, const MlpModel& model);

MlpModel load_model(std::istream& in);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace hm
