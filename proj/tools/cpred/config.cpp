#include "config.hpp"

#include <charconv>
#include <fmt/format.h>

#include "cpred/errors.hpp"

namespace cpred::cli {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  if (text.empty()) return parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError(fmt::format("{}: '{}' is not a number", what, text));
  }
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  int v = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError(
        fmt::format("{}: '{}' is not an integer", what, text));
  }
  return v;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) continue;
    out.push_back(parse_double(part, what));
  }
  return out;
}

namespace {

// Broadcasts a per-margin option: a single value applies to every margin.
template <typename T>
std::vector<T> broadcast(std::vector<T> values, std::size_t margins,
                         const std::string& what) {
  if (values.size() == margins) return values;
  if (values.size() == 1) return std::vector<T>(margins, values.front());
  throw ValidationError(fmt::format(
      "{}: got {} values for {} predictor margin(s)", what, values.size(),
      margins));
}

}  // namespace

RunConfig resolve(const RawConfig& raw) {
  RunConfig cfg;
  cfg.input = raw.input;
  cfg.response = raw.response;
  cfg.predictors = split(raw.predictor, ',');
  if (cfg.predictors.empty()) {
    throw ValidationError("at least one predictor column is required");
  }
  for (const auto& p : cfg.predictors) {
    if (p.empty()) throw ValidationError("empty predictor name");
  }
  cfg.covariates = split(raw.covariates, ',');

  const std::size_t m = cfg.predictors.size();

  std::vector<int> orders;
  for (const auto& part : split(raw.order, ',')) {
    orders.push_back(parse_int(part, "--order"));
  }
  cfg.orders = broadcast(std::move(orders), m, "--order");
  for (int k : cfg.orders) {
    if (k < 1) throw ValidationError("--order: must be >= 1");
  }

  // df segments: empty means unset for that margin.
  std::vector<std::optional<int>> dfs;
  for (const auto& part : split(raw.df, ',')) {
    if (part.empty()) {
      dfs.emplace_back();
    } else {
      dfs.emplace_back(parse_int(part, "--df"));
    }
  }
  if (dfs.empty()) dfs.assign(m, std::nullopt);
  cfg.dfs = broadcast(std::move(dfs), m, "--df");

  // iknots segments are ';'-separated per margin.
  std::vector<std::vector<double>> iknots;
  for (const auto& seg : split(raw.iknots, ';')) {
    iknots.push_back(parse_double_list(seg, "--iknots"));
  }
  if (iknots.empty()) iknots.assign(m, {});
  if (iknots.size() == 1 && m > 1 && iknots.front().empty()) {
    iknots.assign(m, {});
  }
  if (iknots.size() != m) {
    throw ValidationError(fmt::format(
        "--iknots: got {} margin list(s) for {} predictor margin(s)",
        iknots.size(), m));
  }
  cfg.iknots = std::move(iknots);

  for (std::size_t i = 0; i < m; ++i) {
    if (cfg.dfs[i].has_value() && !cfg.iknots[i].empty()) {
      throw ValidationError(fmt::format(
          "margin '{}': --df and --iknots are mutually exclusive. Upstream "
          "conventions let explicit knots silently take precedence over df; "
          "this tool refuses the ambiguity instead: specify exactly one",
          cfg.predictors[i]));
    }
    if (cfg.dfs[i].has_value() && *cfg.dfs[i] < cfg.orders[i]) {
      throw ValidationError(fmt::format(
          "margin '{}': --df {} is below the order {}", cfg.predictors[i],
          *cfg.dfs[i], cfg.orders[i]));
    }
  }

  // bknots: ';'-separated "a,b" pairs per margin.
  std::vector<std::optional<std::pair<double, double>>> bknots;
  for (const auto& seg : split(raw.bknots, ';')) {
    if (seg.empty()) {
      bknots.emplace_back();
      continue;
    }
    const auto pair = parse_double_list(seg, "--bknots");
    if (pair.size() != 2) {
      throw ValidationError("--bknots: each margin takes exactly two values");
    }
    bknots.emplace_back(std::make_pair(pair[0], pair[1]));
  }
  if (bknots.empty()) bknots.assign(m, std::nullopt);
  cfg.bknots = broadcast(std::move(bknots), m, "--bknots");

  cfg.reducible_margins = split(raw.margins, ',');

  cfg.grid_p = parse_int(raw.grid_p, "--grid-p");
  if (cfg.grid_p < 1) throw ValidationError("--grid-p: must be >= 1");

  cfg.out = raw.out;
  cfg.write_csv = cfg.write_json = cfg.write_svg = false;
  for (const auto& f : split(raw.format, ',')) {
    if (f == "csv") cfg.write_csv = true;
    else if (f == "json") cfg.write_json = true;
    else if (f == "svg") cfg.write_svg = true;
    else {
      throw ValidationError(fmt::format(
          "--format: unknown format '{}' (expected csv, json, svg)", f));
    }
  }

  {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(
        raw.seed.data(), raw.seed.data() + raw.seed.size(), v);
    if (ec != std::errc{} || ptr != raw.seed.data() + raw.seed.size()) {
      throw ValidationError(
          fmt::format("--seed: '{}' is not an unsigned integer", raw.seed));
    }
    cfg.seed = v;
  }

  cfg.keep_fit = raw.keep_fit;
  cfg.allow_big_tensor = raw.allow_big_tensor;
  cfg.theta = parse_double_list(raw.theta, "--theta");
  for (const auto& part : split(raw.indices, ',')) {
    if (part.empty()) continue;
    cfg.indices.push_back(parse_int(part, "--indices"));
  }
  cfg.generator = raw.generator;
  cfg.n = parse_int(raw.n, "--n");
  cfg.sigma = parse_double(raw.sigma, "--sigma");
  if (cfg.sigma < 0) throw ValidationError("--sigma: must be >= 0");
  cfg.to = parse_int(raw.to, "--to");
  if (cfg.to < 0) throw ValidationError("--to: must be >= 0");
  cfg.surface_res = parse_int(raw.surface_res, "--surface-res");
  if (cfg.surface_res < 2) {
    throw ValidationError("--surface-res: must be >= 2");
  }
  cfg.at_index = parse_int(raw.at_index, "--at-index");
  if (cfg.at_index < 0) throw ValidationError("--at-index: must be >= 0");
  return cfg;
}

}  // namespace cpred::cli
