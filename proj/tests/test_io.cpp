#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cpred/errors.hpp"
#include "cpred/io/csv.hpp"
#include "cpred/io/svg.hpp"
#include "cpred/simulate.hpp"

namespace fs = std::filesystem;
using cpred::io::CsvTable;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cpred_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("doubles round-trip through the formatter") {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> unif(-1e6, 1e6);
  for (int rep = 0; rep < 500; ++rep) {
    const double v = std::ldexp(unif(rng), static_cast<int>(rng() % 40) - 20);
    const std::string s = cpred::io::format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(cpred::io::format_double(0.1) == "0.1");
  CHECK(cpred::io::format_double(1.0) == "1");
  CHECK(cpred::io::format_double(std::numeric_limits<double>::infinity()) ==
        "inf");
}

TEST_CASE("csv writer and reader invert each other on awkward fields") {
  CsvTable table;
  table.header = {"plain", "comma,field", "quote\"field"};
  table.rows = {{"1", "a,b", "say \"hi\""},
                {"2", "line\nbreak", ""},
                {"3", "-0.25", "x"}};
  const auto path = temp_file("roundtrip.csv");
  cpred::io::write_csv(path, table);
  const CsvTable back = cpred::io::read_csv(path);
  CHECK(back.header == table.header);
  CHECK(back.rows == table.rows);
}

TEST_CASE("csv reader accepts LF-only files and rejects ragged rows") {
  const auto path = temp_file("lf.csv");
  {
    std::ofstream out(path, std::ios::binary);
    out << "a,b\n1,2\n3,4\n";
  }
  const CsvTable t = cpred::io::read_csv(path);
  CHECK(t.rows.size() == 2);
  CHECK(t.rows[1][1] == "4");

  const auto ragged = temp_file("ragged.csv");
  {
    std::ofstream out(ragged, std::ios::binary);
    out << "a,b\n1\n";
  }
  CHECK_THROWS_AS(cpred::io::read_csv(ragged), cpred::ValidationError);
  CHECK_THROWS_AS(cpred::io::read_csv(temp_file("missing.csv")),
                  cpred::IoError);
}

TEST_CASE("datasets load from csv with selective numeric parsing") {
  const auto path = temp_file("data.csv");
  {
    std::ofstream out(path, std::ios::binary);
    out << "x,label,y\r\n0.5,alpha,1.25\r\n0.75,beta,-2\r\n";
  }
  const auto data = cpred::io::read_dataset(path, "y", {"x"});
  CHECK(data.rows() == 2);
  CHECK(data.predictor_values(0) == std::vector<double>{0.5, 0.75});
  CHECK(data.response_values() == std::vector<double>{1.25, -2.0});

  CHECK_THROWS_AS(cpred::io::read_dataset(path, "label", {"x"}),
                  cpred::ValidationError);
  CHECK_THROWS_AS(cpred::io::read_dataset(path, "y", {"nope"}),
                  cpred::ValidationError);
}

TEST_CASE("simulators are deterministic and honor sigma zero") {
  const auto a = cpred::simulate_sine(200, 0.0, 9);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    CHECK(a.response_values()[i] == std::sin(a.predictor_values(0)[i]));
  }
  CHECK(a.predictor_values(0).front() == doctest::Approx(-std::acos(-1.0)));
  CHECK(a.predictor_values(0).back() == doctest::Approx(std::acos(-1.0)));

  const auto b = cpred::simulate_sine(200, 0.3, 12345);
  const auto c = cpred::simulate_sine(200, 0.3, 12345);
  CHECK(b.response_values() == c.response_values());
  const auto d = cpred::simulate_sine(200, 0.3, 54321);
  CHECK(b.response_values() != d.response_values());

  const auto h = cpred::simulate_hormone(300, 0.0, 1);
  CHECK(h.rows() == 300);
  // Left half low, a pronounced peak after zero.
  double peak = -1e9;
  double peak_x = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    if (h.response_values()[i] > peak) {
      peak = h.response_values()[i];
      peak_x = h.predictor_values(0)[i];
    }
  }
  CHECK(peak_x > 0.0);
  CHECK(peak > 0.5);
  CHECK(h.response_values().front() < 0.0);
  CHECK(h.response_values().back() < 0.0);
}

TEST_CASE("svg plots are well-formed and deterministic") {
  cpred::io::SvgPlot plot;
  plot.title = "demo";
  plot.x_label = "x";
  plot.y_label = "y";
  cpred::io::SvgSeries s;
  for (int i = 0; i < 50; ++i) {
    s.x.push_back(i * 0.1);
    s.y.push_back(std::sin(i * 0.1));
  }
  s.label = "sine";
  plot.series.push_back(s);

  std::ostringstream first;
  cpred::io::write_svg(first, plot);
  std::ostringstream second;
  cpred::io::write_svg(second, plot);
  const std::string svg = first.str();
  CHECK(svg == second.str());
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("demo") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
}
