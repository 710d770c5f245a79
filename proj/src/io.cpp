#include "ucoot/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace ucoot {

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

double parse_double(const std::string& field, const std::string& path) {
  try {
    std::size_t consumed = 0;
    const double value = std::stod(field, &consumed);
    while (consumed < field.size() && std::isspace(static_cast<unsigned char>(field[consumed]))) {
      ++consumed;
    }
    if (consumed != field.size()) throw ParseError("");
    return value;
  } catch (const std::exception&) {
    throw ParseError(path + ": not a number: '" + field + "'");
  }
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

Matrix load_matrix_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(parse_double(field, path));
    if (line.back() == ',') throw ParseError(path + ": trailing comma");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path + ": ragged row " + std::to_string(rows.size() + 1) + " (" +
                       std::to_string(row.size()) + " fields, expected " +
                       std::to_string(rows.front().size()) + ")");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": empty matrix");

  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

Vector load_weights(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    values.push_back(parse_double(line, path));
  }
  if (values.empty()) throw ParseError(path + ": empty weight file");
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

LabelVector load_labels(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    const double value = parse_double(line, path);
    const int label = static_cast<int>(value);
    if (static_cast<double>(label) != value || label < 0) {
      throw ParseError(path + ": labels must be nonnegative integers, got '" + line + "'");
    }
    labels.push_back(label);
  }
  if (labels.empty()) throw ParseError(path + ": empty label file");
  return LabelVector::from_labels(std::move(labels));
}

Dataset load_dataset(const std::string& values_path,
                     const std::optional<std::string>& sample_weights_path,
                     const std::optional<std::string>& feature_weights_path) {
  Matrix values = load_matrix_csv(values_path);
  Vector sample_weights = sample_weights_path
                              ? load_weights(*sample_weights_path)
                              : Vector::Constant(values.rows(), 1.0 / values.rows());
  Vector feature_weights = feature_weights_path
                               ? load_weights(*feature_weights_path)
                               : Vector::Constant(values.cols(), 1.0 / values.cols());
  return Dataset(std::move(values), std::move(sample_weights), std::move(feature_weights));
}

std::string format_double(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out.good()) throw IoError("failed writing " + path);
}

}  // namespace ucoot
