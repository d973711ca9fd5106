#include "cpred/dataset.hpp"

#include <cmath>
#include <fmt/format.h>

#include "cpred/errors.hpp"

namespace cpred {

Dataset::Dataset(
    std::vector<std::pair<std::string, std::vector<double>>> columns,
    std::string response, std::vector<std::string> predictors,
    std::vector<std::string> covariates)
    : columns_(std::move(columns)),
      response_(std::move(response)),
      predictors_(std::move(predictors)),
      covariates_(std::move(covariates)) {
  if (columns_.empty()) throw ValidationError("dataset has no columns");
  rows_ = columns_.front().second.size();
  if (rows_ == 0) throw ValidationError("dataset has no rows");
  for (const auto& [name, values] : columns_) {
    if (values.size() != rows_) {
      throw ValidationError(fmt::format(
          "column '{}' has {} rows, expected {}", name, values.size(), rows_));
    }
  }
  if (predictors_.empty()) {
    throw ValidationError("dataset needs at least one predictor column");
  }

  auto check = [&](const std::string& name) {
    if (!has_column(name)) {
      throw ValidationError(fmt::format("column '{}' not found", name));
    }
    for (double v : column(name)) {
      if (!std::isfinite(v)) {
        throw ValidationError(
            fmt::format("column '{}' contains non-finite values", name));
      }
    }
  };
  check(response_);
  for (const auto& p : predictors_) check(p);
  for (const auto& c : covariates_) check(c);
}

bool Dataset::has_column(const std::string& name) const {
  for (const auto& [n, _] : columns_) {
    if (n == name) return true;
  }
  return false;
}

const std::vector<double>& Dataset::column(const std::string& name) const {
  for (const auto& [n, values] : columns_) {
    if (n == name) return values;
  }
  throw ValidationError(fmt::format("column '{}' not found", name));
}

const std::vector<double>& Dataset::response_values() const {
  return column(response_);
}

const std::vector<double>& Dataset::predictor_values(std::size_t i) const {
  if (i >= predictors_.size()) {
    throw ValidationError(
        fmt::format("predictor index {} out of range (have {})", i,
                    predictors_.size()));
  }
  return column(predictors_[i]);
}

}  // namespace cpred
