#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "cpred/basis.hpp"
#include "cpred/cnr.hpp"
#include "cpred/cpr.hpp"
#include "cpred/errors.hpp"
#include "cpred/fit.hpp"
#include "cpred/io/csv.hpp"
#include "cpred/io/svg.hpp"
#include "cpred/simulate.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace cpred::cli {

namespace {

using io::CsvTable;
using io::format_double;

void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create output directory '{}': {}",
                              cfg.out, ec.message()));
  }
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
  return fs::path(cfg.out) / name;
}

void write_json_file(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  }
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.begin(), v.end()));
}

json polygon_json(const ControlPolygon& cp) {
  json j;
  j["xi_star"] = vector_json(cp.abscissae());
  j["theta"] = vector_json(cp.ordinates());
  return j;
}

Dataset load_dataset(const RunConfig& cfg) {
  if (cfg.input.empty()) {
    throw ValidationError("--input is required for this command");
  }
  return io::read_dataset(cfg.input, cfg.response, cfg.predictors,
                          cfg.covariates);
}

// Knot sequence for one margin: explicit interior knots win over df-derived
// trimmed quantiles (the two are mutually exclusive by construction), and
// boundary knots default to the observed data range.
KnotSequence resolve_knots(const RunConfig& cfg, std::size_t margin,
                           const std::vector<double>& column) {
  const int order = cfg.orders[margin];
  std::pair<double, double> boundary;
  if (cfg.bknots[margin].has_value()) {
    boundary = *cfg.bknots[margin];
  } else {
    const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
    boundary = {*lo, *hi};
  }

  std::vector<double> interior = cfg.iknots[margin];
  if (cfg.dfs[margin].has_value()) {
    const int l = *cfg.dfs[margin] - order;
    if (l > 0) {
      std::vector<double> probs(static_cast<std::size_t>(l));
      for (int j = 1; j <= l; ++j) {
        probs[static_cast<std::size_t>(j - 1)] =
            static_cast<double>(j) / (l + 1);
      }
      interior = trimmed_quantile(column, probs);
    }
  }
  return KnotSequence(order, boundary, interior);
}

// Sorts plot points by x so unsorted datasets draw sane polylines.
std::vector<std::size_t> sorted_order(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  return order;
}

json knots_json(const KnotSequence& ks) {
  json j;
  j["order"] = ks.order();
  j["bknots"] = json::array({ks.a(), ks.b()});
  j["iknots"] = ks.interior();
  j["df"] = ks.coefficient_count();
  j["xi"] = ks.full();
  j["xi_star"] = vector_json(greville_sites(ks));
  return j;
}

CsvTable summary_table(const std::vector<SummaryRow>& rows) {
  CsvTable table;
  table.header = {"index", "l", "dfs", "rmse", "loglik"};
  for (const auto& row : rows) {
    table.rows.push_back({std::to_string(row.index),
                          std::to_string(row.interior_count),
                          std::to_string(row.dfs), format_double(row.rmse),
                          format_double(row.loglik)});
  }
  return table;
}

void write_overlay_svg(const RunConfig& cfg, const DiagnosticBundle& bundle,
                       const std::string& filename) {
  io::SvgPlot plot;
  plot.title = "sequential control polygons";
  plot.x_label = "x";
  plot.y_label = "spline / polygon";
  for (const auto& overlay : bundle.overlays) {
    io::SvgSeries vertices;
    vertices.x = overlay.vertex_x;
    vertices.y = overlay.vertex_y;
    vertices.label = fmt::format("index {}", overlay.index);
    vertices.markers = true;
    plot.series.push_back(std::move(vertices));
  }
  io::write_svg(out_path(cfg, filename), plot);
}

}  // namespace

void run_basis(const RunConfig& cfg) {
  if (cfg.predictors.size() != 1) {
    throw ValidationError("basis works on exactly one predictor");
  }
  const Dataset data = load_dataset(cfg);
  const auto& xs = data.predictor_values(0);
  const KnotSequence knots = resolve_knots(cfg, 0, xs);
  const BasisMatrix basis = basis_matrix(xs, knots);

  ensure_out_dir(cfg);
  if (cfg.write_csv) {
    CsvTable table;
    table.header = {"x"};
    for (int j = 1; j <= knots.coefficient_count(); ++j) {
      table.header.push_back(fmt::format("B{}", j));
    }
    for (Eigen::Index i = 0; i < basis.rows(); ++i) {
      std::vector<std::string> row{format_double(xs[static_cast<std::size_t>(i)])};
      for (Eigen::Index j = 0; j < basis.cols(); ++j) {
        row.push_back(format_double(basis.values(i, j)));
      }
      table.rows.push_back(std::move(row));
    }
    io::write_csv(out_path(cfg, "basis.csv"), table);
  }
  if (cfg.write_json) {
    write_json_file(out_path(cfg, "knots.json"), knots_json(knots));
  }
  if (cfg.write_svg) {
    io::SvgPlot plot;
    plot.title = "B-spline basis";
    plot.x_label = "x";
    plot.y_label = "B";
    const auto order = sorted_order(xs);
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      io::SvgSeries series;
      series.label = j < 8 ? fmt::format("B{}", j + 1) : "";
      for (std::size_t i : order) {
        series.x.push_back(xs[i]);
        series.y.push_back(basis.values(static_cast<Eigen::Index>(i), j));
      }
      plot.series.push_back(std::move(series));
    }
    io::write_svg(out_path(cfg, "basis.svg"), plot);
  }
}

void run_influence(const RunConfig& cfg) {
  if (cfg.predictors.size() != 1) {
    throw ValidationError("influence works on exactly one predictor");
  }

  std::optional<ControlPolygon> cp;
  if (!cfg.theta.empty()) {
    // Explicit polygon: knots come entirely from flags.
    if (!cfg.bknots[0].has_value() && cfg.input.empty()) {
      throw ValidationError(
          "--theta needs --bknots (or --input to infer the data range)");
    }
    std::vector<double> column;
    if (!cfg.bknots[0].has_value()) {
      column = load_dataset(cfg).predictor_values(0);
    }
    const KnotSequence knots = resolve_knots(cfg, 0, column);
    const auto n = static_cast<Eigen::Index>(cfg.theta.size());
    if (n != knots.coefficient_count()) {
      throw ValidationError(fmt::format(
          "--theta has {} entries, the knot sequence needs {}", n,
          knots.coefficient_count()));
    }
    cp.emplace(knots, Eigen::Map<const Eigen::VectorXd>(cfg.theta.data(), n));
  } else {
    const Dataset data = load_dataset(cfg);
    const KnotSequence knots =
        resolve_knots(cfg, 0, data.predictor_values(0));
    cp.emplace(fit_control_polygon(data, knots, cfg.keep_fit));
  }

  const InfluenceReport report = influence_of(*cp, cfg.indices);

  ensure_out_dir(cfg);
  if (cfg.write_csv) {
    CsvTable table;
    table.header = {"index", "iknots", "w", "rank"};
    for (const auto& e : report.entries) {
      table.rows.push_back({std::to_string(e.index), format_double(e.knot),
                            format_double(e.weight), std::to_string(e.rank)});
    }
    io::write_csv(out_path(cfg, "influence.csv"), table);
  }
  if (cfg.write_json) {
    json doc;
    doc["original"] = polygon_json(report.original);
    doc["entries"] = json::array();
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
      const auto& e = report.entries[i];
      json entry;
      entry["index"] = e.index;
      entry["iknot"] = e.knot;
      entry["w"] = e.weight;
      entry["rank"] = e.rank;
      entry["coarsened"] = polygon_json(report.coarsened[i]);
      entry["reinserted"] = polygon_json(report.reinserted[i]);
      doc["entries"].push_back(std::move(entry));
    }
    write_json_file(out_path(cfg, "influence_polygons.json"), doc);
  }
  if (cfg.write_svg) {
    io::SvgPlot plot;
    plot.title = "knot influence overlays";
    plot.x_label = "x";
    plot.y_label = "theta";
    io::SvgSeries original;
    original.x.assign(report.original.abscissae().begin(),
                      report.original.abscissae().end());
    original.y.assign(report.original.ordinates().begin(),
                      report.original.ordinates().end());
    original.label = "original";
    original.markers = true;
    plot.series.push_back(std::move(original));
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
      io::SvgSeries reinserted;
      reinserted.x.assign(report.reinserted[i].abscissae().begin(),
                          report.reinserted[i].abscissae().end());
      reinserted.y.assign(report.reinserted[i].ordinates().begin(),
                          report.reinserted[i].ordinates().end());
      reinserted.label =
          fmt::format("reinserted {}", report.entries[i].index);
      plot.series.push_back(std::move(reinserted));
    }
    io::write_svg(out_path(cfg, "influence.svg"), plot);
  }
}

void run_cpr(const RunConfig& cfg) {
  if (cfg.predictors.size() != 1) {
    throw ValidationError("cpr works on exactly one predictor");
  }
  const Dataset data = load_dataset(cfg);
  const KnotSequence initial =
      resolve_knots(cfg, 0, data.predictor_values(0));

  CprOptions options;
  options.keep_fit = cfg.keep_fit;
  const CprRun run = cpr_run(data, initial, options);
  const auto rows = summarize(run);
  const int to = cfg.to > 0 ? std::min(cfg.to, run.size()) : run.size();
  const DiagnosticBundle bundle = diagnostics(run, to);

  ensure_out_dir(cfg);
  if (cfg.write_csv) {
    io::write_csv(out_path(cfg, "summary.csv"), summary_table(rows));

    CsvTable removals;
    removals.header = {"step", "knot", "weight"};
    for (const auto& r : run.removed()) {
      removals.rows.push_back({std::to_string(r.step), format_double(r.knot),
                               format_double(r.weight)});
    }
    io::write_csv(out_path(cfg, "removals.csv"), removals);

    CsvTable curve;
    curve.header = {"index", "dfs", "rmse"};
    for (const auto& row : rows) {
      curve.rows.push_back({std::to_string(row.index),
                            std::to_string(row.dfs),
                            format_double(row.rmse)});
    }
    io::write_csv(out_path(cfg, "rmse_curve.csv"), curve);

    CsvTable overlay;
    overlay.header = {"index", "series", "x", "y"};
    for (const auto& series : bundle.overlays) {
      for (std::size_t i = 0; i < series.vertex_x.size(); ++i) {
        overlay.rows.push_back({std::to_string(series.index), "vertex",
                                format_double(series.vertex_x[i]),
                                format_double(series.vertex_y[i])});
      }
      for (std::size_t i = 0; i < series.trace_x.size(); ++i) {
        overlay.rows.push_back({std::to_string(series.index), "spline",
                                format_double(series.trace_x[i]),
                                format_double(series.trace_y[i])});
      }
    }
    io::write_csv(out_path(cfg, "overlay.csv"), overlay);
  }
  if (cfg.write_json) {
    json doc = json::array();
    for (const auto& row : rows) {
      const ControlPolygon& cp = run.polygon(row.index);
      json entry;
      entry["index"] = row.index;
      entry["l"] = row.interior_count;
      entry["dfs"] = row.dfs;
      entry["order"] = cp.knots().order();
      entry["bknots"] = json::array({cp.knots().a(), cp.knots().b()});
      entry["iknots"] = cp.knots().interior();
      entry["xi_star"] = vector_json(cp.abscissae());
      entry["theta"] = vector_json(cp.ordinates());
      entry["rmse"] = row.rmse;
      entry["loglik"] = row.loglik;
      doc.push_back(std::move(entry));
    }
    write_json_file(out_path(cfg, "polygons.json"), doc);
  }
  if (cfg.write_svg) {
    io::SvgPlot curve;
    curve.title = "rmse by model index";
    curve.x_label = "index (interior knots + 1)";
    curve.y_label = "rmse";
    io::SvgSeries series;
    for (const auto& [index, rmse] : bundle.rmse_by_index) {
      series.x.push_back(index);
      series.y.push_back(rmse);
    }
    series.markers = true;
    curve.series.push_back(std::move(series));
    io::write_svg(out_path(cfg, "cpr_rmse.svg"), curve);

    write_overlay_svg(cfg, bundle, "cpr_overlay.svg");
  }
}

void run_cnr(const RunConfig& cfg) {
  const std::size_t m = cfg.predictors.size();
  if (m < 2) {
    throw ValidationError("cnr needs at least two predictor margins");
  }
  const Dataset data = load_dataset(cfg);

  std::vector<KnotSequence> margins;
  margins.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    margins.push_back(resolve_knots(cfg, i, data.predictor_values(i)));
  }

  // Reducible margins by predictor name or 1-based position.
  CnrOptions options;
  for (const auto& token : cfg.reducible_margins) {
    if (token.empty()) continue;
    const auto named = std::find(cfg.predictors.begin(), cfg.predictors.end(),
                                 token);
    if (named != cfg.predictors.end()) {
      options.reducible.push_back(
          static_cast<int>(named - cfg.predictors.begin()));
      continue;
    }
    const int pos = parse_int(token, "--margins");
    if (pos < 1 || pos > static_cast<int>(m)) {
      throw ValidationError(fmt::format(
          "--margins: '{}' is neither a predictor name nor a position in "
          "[1, {}]",
          token, m));
    }
    options.reducible.push_back(pos - 1);
  }
  options.grid_p = cfg.grid_p;
  options.keep_fit = cfg.keep_fit;
  options.allow_big_tensor = cfg.allow_big_tensor;

  const CnrRun run = cnr_run(data, margins, options);
  const auto rows = summarize(run);

  const int at = cfg.at_index > 0 ? cfg.at_index : run.size();
  const ControlNet& surface_net = run.net(at);

  ensure_out_dir(cfg);
  if (cfg.write_csv) {
    CsvTable summary;
    summary.header = {"index", "dfs", "rmse", "loglik"};
    for (const auto& p : cfg.predictors) summary.header.push_back("l_" + p);
    for (const auto& row : rows) {
      std::vector<std::string> cells{
          std::to_string(row.index), std::to_string(row.dfs),
          format_double(row.rmse), format_double(row.loglik)};
      for (int l : row.interior_counts) cells.push_back(std::to_string(l));
      summary.rows.push_back(std::move(cells));
    }
    io::write_csv(out_path(cfg, "summary.csv"), summary);

    CsvTable removals;
    removals.header = {"step", "margin", "knot", "weight"};
    for (const auto& r : run.removed()) {
      removals.rows.push_back(
          {std::to_string(r.step),
           cfg.predictors[static_cast<std::size_t>(r.margin)],
           format_double(r.knot), format_double(r.weight)});
    }
    io::write_csv(out_path(cfg, "removals.csv"), removals);

    // Lattice evaluation of the selected net over the margin boundaries.
    CsvTable surface;
    for (const auto& p : cfg.predictors) surface.header.push_back("x_" + p);
    surface.header.push_back("value");
    std::vector<std::size_t> idx(m, 0);
    std::vector<double> point(m);
    const auto res = static_cast<std::size_t>(cfg.surface_res);
    while (true) {
      std::vector<std::string> cells;
      for (std::size_t i = 0; i < m; ++i) {
        const auto& ks = surface_net.margins[i];
        point[i] = ks.a() + (ks.b() - ks.a()) *
                                static_cast<double>(idx[i]) /
                                static_cast<double>(res - 1);
        cells.push_back(format_double(point[i]));
      }
      cells.push_back(format_double(tensor_eval(point, surface_net)));
      surface.rows.push_back(std::move(cells));
      std::size_t pos = 0;
      while (pos < m) {
        if (++idx[pos] < res) break;
        idx[pos] = 0;
        ++pos;
      }
      if (pos == m) break;
    }
    io::write_csv(out_path(cfg, "surface.csv"), surface);
  }
  if (cfg.write_json) {
    json doc = json::array();
    for (const auto& row : rows) {
      const ControlNet& net = run.net(row.index);
      json entry;
      entry["index"] = row.index;
      entry["dfs"] = row.dfs;
      entry["rmse"] = row.rmse;
      entry["loglik"] = row.loglik;
      entry["margins"] = json::array();
      for (std::size_t i = 0; i < net.margins.size(); ++i) {
        json margin;
        margin["predictor"] = cfg.predictors[i];
        margin["order"] = net.margins[i].order();
        margin["bknots"] =
            json::array({net.margins[i].a(), net.margins[i].b()});
        margin["iknots"] = net.margins[i].interior();
        entry["margins"].push_back(std::move(margin));
      }
      entry["theta"] = vector_json(net.theta);
      doc.push_back(std::move(entry));
    }
    write_json_file(out_path(cfg, "nets.json"), doc);
  }
  if (cfg.write_svg) {
    io::SvgPlot curve;
    curve.title = "rmse by model index";
    curve.x_label = "index";
    curve.y_label = "rmse";
    io::SvgSeries series;
    for (const auto& row : rows) {
      series.x.push_back(row.index);
      series.y.push_back(row.rmse);
    }
    series.markers = true;
    curve.series.push_back(std::move(series));
    io::write_svg(out_path(cfg, "cnr_rmse.svg"), curve);
  }
}

void run_simulate(const RunConfig& cfg) {
  std::optional<Dataset> data;
  if (cfg.generator == "sine") {
    data.emplace(simulate_sine(cfg.n, cfg.sigma, cfg.seed));
  } else if (cfg.generator == "hormone") {
    data.emplace(simulate_hormone(cfg.n, cfg.sigma, cfg.seed));
  } else if (cfg.generator == "spline") {
    if (!cfg.bknots[0].has_value()) {
      throw ValidationError("the spline generator needs --bknots");
    }
    if (cfg.theta.empty()) {
      throw ValidationError("the spline generator needs --theta");
    }
    const KnotSequence knots(cfg.orders[0], *cfg.bknots[0], cfg.iknots[0]);
    const auto n = static_cast<Eigen::Index>(cfg.theta.size());
    if (n != knots.coefficient_count()) {
      throw ValidationError(fmt::format(
          "--theta has {} entries, the knot sequence needs {}", n,
          knots.coefficient_count()));
    }
    data.emplace(simulate_spline(
        knots, Eigen::Map<const Eigen::VectorXd>(cfg.theta.data(), n), cfg.n,
        cfg.sigma, cfg.seed));
  } else {
    throw ValidationError(fmt::format(
        "unknown generator '{}' (expected sine, spline, hormone)",
        cfg.generator));
  }

  ensure_out_dir(cfg);
  CsvTable table;
  table.header = {"x", "y"};
  const auto& xs = data->predictor_values(0);
  const auto& ys = data->response_values();
  for (std::size_t i = 0; i < data->rows(); ++i) {
    table.rows.push_back({format_double(xs[i]), format_double(ys[i])});
  }
  io::write_csv(out_path(cfg, "data.csv"), table);
}

}  // namespace cpred::cli
