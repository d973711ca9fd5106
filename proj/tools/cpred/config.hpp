#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cpred::cli {

/// Raw option values as given on the command line or in a JSON config file.
/// List-valued options keep the flag syntax: ',' separates values, ';'
/// separates margins. Typed resolution and validation happen in RunConfig.
struct RawConfig {
  std::string config_path;
  std::string input;
  std::string response = "y";
  std::string predictor = "x";
  std::string covariates;
  std::string order = "4";
  std::string df;
  std::string iknots;
  std::string bknots;
  std::string margins;
  std::string grid_p = "20";
  std::string out = ".";
  std::string format = "csv,json";
  std::string seed = "0";
  std::string theta;
  std::string indices;
  std::string generator = "sine";
  std::string n = "200";
  std::string sigma = "0";
  std::string to = "0";
  std::string surface_res = "25";
  std::string at_index = "0";
  bool keep_fit = false;
  bool allow_big_tensor = false;
};

/// Fully validated configuration for one command.
struct RunConfig {
  std::string input;
  std::string response;
  std::vector<std::string> predictors;
  std::vector<std::string> covariates;
  std::vector<int> orders;                        // per margin
  std::vector<std::optional<int>> dfs;            // per margin, unset allowed
  std::vector<std::vector<double>> iknots;        // per margin, empty = unset
  std::vector<std::optional<std::pair<double, double>>> bknots;  // per margin
  std::vector<std::string> reducible_margins;     // names or 1-based numbers
  int grid_p = 20;
  std::string out;
  bool write_csv = true;
  bool write_json = true;
  bool write_svg = false;
  std::uint64_t seed = 0;
  bool keep_fit = false;
  bool allow_big_tensor = false;
  std::vector<double> theta;
  std::vector<int> indices;
  std::string generator;
  int n = 200;
  double sigma = 0.0;
  int to = 0;
  int surface_res = 25;
  int at_index = 0;
};

/// Splits on a separator; an empty input yields no parts, and interior empty
/// segments are preserved ("a,,b" -> {"a", "", "b"}).
std::vector<std::string> split(const std::string& text, char sep);

double parse_double(const std::string& text, const std::string& what);
int parse_int(const std::string& text, const std::string& what);
std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what);

/// Validates and types a raw configuration. margin_count is the number of
/// predictors the command will use; per-margin options are broadcast when a
/// single value is given.
RunConfig resolve(const RawConfig& raw);

}  // namespace cpred::cli
