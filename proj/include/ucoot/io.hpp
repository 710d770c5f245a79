#pragma once

#include <optional>
#include <string>

#include "ucoot/transfer.hpp"
#include "ucoot/types.hpp"

namespace ucoot {

/// Headerless comma-separated matrix, one row per sample. Ragged rows and
/// non-numeric fields are ParseError; a missing file is IoError.
Matrix load_matrix_csv(const std::string& path);

/// One float per line.
Vector load_weights(const std::string& path);

/// One integer label per line; the class count is max label + 1.
LabelVector load_labels(const std::string& path);

/// Values plus optional sidecar weight files; absent sidecars default to
/// uniform probability weights.
Dataset load_dataset(const std::string& values_path,
                     const std::optional<std::string>& sample_weights_path = std::nullopt,
                     const std::optional<std::string>& feature_weights_path = std::nullopt);

/// Round-trip-exact formatting (%.17g).
void write_matrix_csv(const std::string& path, const Matrix& m);

std::string format_double(double x);

}  // namespace ucoot
