#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "cpred/errors.hpp"
#include "cpred/io/csv.hpp"

namespace {

using cpred::cli::RawConfig;
using cpred::cli::RunConfig;

// One bound option: either a string or a boolean target in the RawConfig.
struct Binding {
  std::string name;  // config-file key, same spelling as the long flag
  CLI::Option* option = nullptr;
  std::string* text = nullptr;
  bool* flag = nullptr;
};

struct CommandBindings {
  CLI::App* app = nullptr;
  std::vector<Binding> bindings;
};

void bind_text(CommandBindings& cb, const std::string& flag, std::string& target,
               const std::string& help) {
  CLI::Option* opt = cb.app->add_option("--" + flag, target, help);
  cb.bindings.push_back(Binding{flag, opt, &target, nullptr});
}

void bind_flag(CommandBindings& cb, const std::string& flag, bool& target,
               const std::string& help) {
  CLI::Option* opt = cb.app->add_flag("--" + flag, target, help);
  cb.bindings.push_back(Binding{flag, opt, nullptr, &target});
}

void add_common(CommandBindings& cb, RawConfig& raw) {
  bind_text(cb, "config", raw.config_path,
            "JSON config file; flags take precedence over its values");
  bind_text(cb, "input", raw.input, "input CSV file");
  bind_text(cb, "response", raw.response, "response column name");
  bind_text(cb, "predictor", raw.predictor,
            "predictor column name(s), comma separated");
  bind_text(cb, "covariates", raw.covariates,
            "fixed-effect covariate column names, comma separated");
  bind_text(cb, "order", raw.order,
            "polynomial order per margin (order = degree + 1)");
  bind_text(cb, "df", raw.df,
            "degrees of freedom per margin; df - order interior knots are "
            "placed on trimmed quantiles");
  bind_text(cb, "iknots", raw.iknots,
            "explicit interior knots; ',' within a margin, ';' between "
            "margins");
  bind_text(cb, "bknots", raw.bknots,
            "boundary knots 'a,b' per margin (';' between margins); default "
            "is the data range");
  bind_text(cb, "margins", raw.margins,
            "margins to reduce (predictor names or 1-based positions)");
  bind_text(cb, "grid-p", raw.grid_p,
            "conditioning grid points per margin");
  bind_text(cb, "out", raw.out, "output directory");
  bind_text(cb, "format", raw.format, "output formats: csv,json,svg");
  bind_text(cb, "seed", raw.seed, "random seed for simulators");
  bind_flag(cb, "keep-fit", raw.keep_fit,
            "retain residual vectors on stored fits");
  bind_flag(cb, "allow-big-tensor", raw.allow_big_tensor,
            "permit tensor bases with more coefficients than data rows");
}

// flags > config file > defaults: config values fill only options that were
// not given on the command line.
void merge_config_file(const CommandBindings& cb) {
  std::string path;
  for (const auto& b : cb.bindings) {
    if (b.name == "config" && b.text) path = *b.text;
  }
  if (path.empty()) return;

  std::ifstream in(path);
  if (!in) {
    throw cpred::IoError("cannot open config file '" + path + "'");
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw cpred::ValidationError(std::string("config file: ") + e.what());
  }
  if (!doc.is_object()) {
    throw cpred::ValidationError("config file must hold a JSON object");
  }

  for (const auto& [key, value] : doc.items()) {
    const auto binding =
        std::find_if(cb.bindings.begin(), cb.bindings.end(),
                     [&](const Binding& b) { return b.name == key; });
    if (binding == cb.bindings.end()) {
      throw cpred::ValidationError("config file: unknown key '" + key + "'");
    }
    if (binding->option->count() > 0) continue;  // flag wins

    if (binding->flag) {
      if (!value.is_boolean()) {
        throw cpred::ValidationError("config file: '" + key +
                                     "' must be a boolean");
      }
      *binding->flag = value.get<bool>();
      continue;
    }
    if (value.is_string()) {
      *binding->text = value.get<std::string>();
    } else if (value.is_number_integer()) {
      *binding->text = std::to_string(value.get<long long>());
    } else if (value.is_number_float()) {
      *binding->text = cpred::io::format_double(value.get<double>());
    } else if (value.is_array()) {
      // Arrays map to flag list syntax; an array of arrays is one list per
      // margin, ';' separated.
      const auto scalar = [&](const nlohmann::json& v) -> std::string {
        if (v.is_number()) return cpred::io::format_double(v.get<double>());
        if (v.is_string()) return v.get<std::string>();
        throw cpred::ValidationError("config file: '" + key +
                                     "' holds an unsupported array element");
      };
      const bool nested =
          std::any_of(value.begin(), value.end(),
                      [](const nlohmann::json& v) { return v.is_array(); });
      std::string joined;
      bool first = true;
      for (const auto& item : value) {
        if (!first) joined += nested ? ';' : ',';
        first = false;
        if (!nested) {
          joined += scalar(item);
          continue;
        }
        if (!item.is_array()) {
          throw cpred::ValidationError(
              "config file: '" + key +
              "' mixes margin lists with scalar values");
        }
        bool inner_first = true;
        for (const auto& v : item) {
          if (!inner_first) joined += ',';
          inner_first = false;
          joined += scalar(v);
        }
      }
      *binding->text = joined;
    } else {
      throw cpred::ValidationError("config file: unsupported value for '" +
                                   key + "'");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cpred: B-spline regression model selection via control polygon "
      "reduction"};
  app.require_subcommand(1);

  RawConfig raw;
  std::vector<CommandBindings> commands;

  auto make_command = [&](const std::string& name, const std::string& help) {
    CommandBindings cb;
    cb.app = app.add_subcommand(name, help);
    add_common(cb, raw);
    return cb;
  };

  // NOTE: add_common binds into the CommandBindings created last, so build
  // each subcommand fully before starting the next.
  commands.push_back(make_command(
      "basis", "evaluate a B-spline basis over the predictor column"));
  commands.push_back(make_command(
      "influence",
      "score interior knots by influence weight on a control polygon"));
  bind_text(commands.back(), "theta", raw.theta,
            "explicit control polygon ordinates, comma separated");
  bind_text(commands.back(), "indices", raw.indices,
            "1-based full-sequence knot indices to score (default: all "
            "interior)");
  commands.push_back(make_command(
      "cpr", "run the control polygon reduction over a single predictor"));
  bind_text(commands.back(), "to", raw.to,
            "largest model index included in overlay diagnostics (0 = all)");
  commands.push_back(make_command(
      "cnr", "run the control net reduction over tensor-product margins"));
  bind_text(commands.back(), "surface-res", raw.surface_res,
            "lattice resolution per margin for surface.csv");
  bind_text(commands.back(), "at-index", raw.at_index,
            "model index evaluated on the surface lattice (0 = initial "
            "model)");
  commands.push_back(make_command("simulate", "write a synthetic dataset"));
  bind_text(commands.back(), "generator", raw.generator,
            "sine, spline, or hormone");
  bind_text(commands.back(), "n", raw.n, "number of observations");
  bind_text(commands.back(), "sigma", raw.sigma,
            "Gaussian noise standard deviation");
  bind_text(commands.back(), "theta", raw.theta,
            "spline generator ordinates, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "cpred: " << e.what() << '\n';
    return 2;
  }

  try {
    const std::vector<std::string> names{"basis", "influence", "cpr", "cnr",
                                         "simulate"};
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (!commands[i].app->parsed()) continue;
      merge_config_file(commands[i]);
      const RunConfig cfg = cpred::cli::resolve(raw);
      if (names[i] == "basis") cpred::cli::run_basis(cfg);
      else if (names[i] == "influence") cpred::cli::run_influence(cfg);
      else if (names[i] == "cpr") cpred::cli::run_cpr(cfg);
      else if (names[i] == "cnr") cpred::cli::run_cnr(cfg);
      else cpred::cli::run_simulate(cfg);
      return 0;
    }
    std::cerr << "cpred: no command selected\n";
    return 2;
  } catch (const cpred::ValidationError& e) {
    std::cerr << "cpred: " << e.what() << '\n';
    return 2;
  } catch (const cpred::RankError& e) {
    std::cerr << "cpred: " << e.what() << '\n';
    return 3;
  } catch (const cpred::IoError& e) {
    std::cerr << "cpred: " << e.what() << '\n';
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "cpred: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "cpred: " << e.what() << '\n';
    return 3;
  }
}
