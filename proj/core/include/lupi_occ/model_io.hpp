#pragma once

// Versioned plain-text model files. Numbers are written in their shortest
// exact decimal form, so a saved model predicts exactly like the original.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lupi_occ/data.hpp"
#include "lupi_occ/occ.hpp"

namespace lupi_occ {

inline constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<KocModel, KocPlusModel>;

struct ModelFile {
  AnyModel model;
  std::uint64_t seed = 0;
  int target_class = 0;
  std::vector<std::string> feature_names;      // may be empty
  std::optional<Standardizer> standardizer;    // applied to inputs before scoring
};

std::string serialize_model(const ModelFile& file);
// Throws FormatError ("model parse error: ...") on malformed input.
ModelFile parse_model(const std::string& text);

void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

const KocModel& decision_model(const AnyModel& model) noexcept;

// Applies the stored standardizer (if any) and returns labels.
std::vector<Label> predict_labels(const ModelFile& file, const PointSet& raw_points);
Vector predict_scores(const ModelFile& file, const PointSet& raw_points);

}  // namespace lupi_occ
