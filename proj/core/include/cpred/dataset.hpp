#pragma once

#include <string>
#include <vector>

namespace cpred {

/// A named-column numeric table with designated response, predictor, and
/// fixed-effect covariate columns. All referenced columns must exist, have
/// equal length, and contain only finite values.
class Dataset {
 public:
  Dataset(std::vector<std::pair<std::string, std::vector<double>>> columns,
          std::string response, std::vector<std::string> predictors,
          std::vector<std::string> covariates = {});

  std::size_t rows() const { return rows_; }
  const std::string& response() const { return response_; }
  const std::vector<std::string>& predictors() const { return predictors_; }
  const std::vector<std::string>& covariates() const { return covariates_; }

  bool has_column(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;

  const std::vector<double>& response_values() const;
  /// Values of the i-th predictor column (0-based).
  const std::vector<double>& predictor_values(std::size_t i = 0) const;

 private:
  std::vector<std::pair<std::string, std::vector<double>>> columns_;
  std::string response_;
  std::vector<std::string> predictors_;
  std::vector<std::string> covariates_;
  std::size_t rows_ = 0;
};

}  // namespace cpred
