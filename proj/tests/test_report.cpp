#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "dip/common.hpp"
#include "dip/forceplot.hpp"
#include "dip/report.hpp"
#include "dip/runner.hpp"

using namespace dip;

namespace {

RunConfig small_decompose_config() {
  RunConfig config;
  config.command = Command::decompose;
  config.example_name = "gaussian";
  config.gaussian_params = {2.0, 0.5};
  config.example_n = 2000;
  config.group_a = {"x1"};
  config.seed = 5;
  config.learner.rounds = 40;
  config.learner.min_leaf = 5;
  return config;
}

std::size_t count_occurrences(const std::string& text, const std::string& what) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(what); pos != std::string::npos;
       pos = text.find(what, pos + what.size())) {
    ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("report round-trips losslessly and verifies clean") {
  const Report report = run(small_decompose_config());
  const ValidationResult fresh = verify_report(report);
  CHECK(fresh.ok());

  report.save("./report_roundtrip.json");
  const Report loaded = Report::load("./report_roundtrip.json");
  CHECK(loaded.body == report.body);  // bit-exact numeric round-trip
  CHECK(loaded.checksum == report.checksum);
  CHECK(verify_report(loaded).ok());
  std::remove("./report_roundtrip.json");
}

TEST_CASE("same config and seed produce a byte-identical body") {
  const Report a = run(small_decompose_config());
  const Report b = run(small_decompose_config());
  CHECK(a.body.dump() == b.body.dump());
  CHECK(a.checksum == b.checksum);
}

TEST_CASE("perturbing a field flags exactly the identities touching it") {
  Report report = run(small_decompose_config());
  report.body["entries"][0]["psi"] =
      report.body["entries"][0]["psi"].get<double>() + 0.5;
  report.checksum = fnv1a_hex(report.body.dump());  // keep checksum clean
  const ValidationResult result = verify_report(report);
  REQUIRE(result.violations.size() == 2);
  CHECK(result.violations[0].what.find("psi = v_joint") != std::string::npos);
  CHECK(result.violations[1].what.find("psi = interaction_surplus") !=
        std::string::npos);
}

TEST_CASE("checksum and schema mismatches are flagged") {
  Report report = run(small_decompose_config());
  report.body["entries"][0]["v_j"] = 0.123;  // body changed, checksum stale
  const ValidationResult tampered = verify_report(report);
  CHECK_FALSE(tampered.ok());

  Report old_schema = run(small_decompose_config());
  old_schema.body["schema_version"] = "0";
  old_schema.checksum = fnv1a_hex(old_schema.body.dump());
  const ValidationResult result = verify_report(old_schema);
  REQUIRE_FALSE(result.ok());
  CHECK(result.violations[0].what.find("version mismatch") != std::string::npos);
}

TEST_CASE("report parse errors") {
  CHECK_THROWS_AS(Report::parse("not json"), ParseError);
  CHECK_THROWS_AS(Report::parse("{\"meta\": {}}"), ParseError);
  CHECK_THROWS_AS(Report::load("missing-file.json"), IoError);
}

TEST_CASE("forceplot renders segments, slim bars and a reference line") {
  const Report report = run(small_decompose_config());
  const std::string svg = forceplot_svg(report);

  CHECK(svg.find("viewBox=\"0 0 1000 600\"") != std::string::npos);
  CHECK(count_occurrences(svg, std::string("fill=\"") + kStandaloneGray) >= 2);
  CHECK(count_occurrences(svg, std::string("fill=\"") + kInteractionGreen) >= 1);
  CHECK(count_occurrences(svg, std::string("fill=\"") + kDependencePurple) >= 1);
  CHECK(count_occurrences(svg, std::string("fill=\"") + kCrossPredPurple) >= 1);
  CHECK(count_occurrences(svg, std::string("fill=\"") + kCovariancePurple) >= 1);
  CHECK(svg.find("<line") != std::string::npos);

  // Deterministic output.
  CHECK(forceplot_svg(report) == svg);

  render_forceplot(report, "./plot.svg");
  std::ifstream in("./plot.svg");
  CHECK(in.good());
  std::remove("./plot.svg");
}

TEST_CASE("forceplot draws a negative-dep segment in the positive direction") {
  // Build a loco-style report by hand with dep < 0; the purple segment's
  // contribution is -dep > 0, so it stacks upward from the standalone top.
  nlohmann::ordered_json body;
  body["schema_version"] = kReportSchemaVersion;
  body["command"] = "loco";
  nlohmann::ordered_json entry;
  entry["feature"] = "x";
  entry["standalone"] = 0.4;
  entry["interaction"] = 0.0;
  entry["dependencies"] = -0.2;
  entry["cross_pred"] = -0.1;
  entry["covariance"] = -0.1;
  entry["loco"] = 0.6;
  body["entries"] = nlohmann::ordered_json::array({entry});
  const Report report = Report::wrap(body);
  CHECK(verify_report(report).ok());

  const std::string svg = forceplot_svg(report);
  // Locate the purple main segment and the gray one; the purple rect must
  // sit above (smaller y) the gray stack top since its contribution is +0.2.
  const auto gray_pos = svg.find(std::string("fill=\"") + kStandaloneGray);
  const auto purple_pos = svg.find(std::string("fill=\"") + kDependencePurple);
  REQUIRE(gray_pos != std::string::npos);
  REQUIRE(purple_pos != std::string::npos);
  auto rect_y = [&](std::size_t fill_pos) {
    const std::size_t rect_start = svg.rfind("<rect", fill_pos);
    const std::size_t y_pos = svg.find("y=\"", rect_start);
    return std::stod(svg.substr(y_pos + 3));
  };
  CHECK(rect_y(purple_pos) < rect_y(gray_pos));

  // An empty report cannot be plotted.
  nlohmann::ordered_json empty_body;
  empty_body["schema_version"] = kReportSchemaVersion;
  empty_body["command"] = "loco";
  empty_body["entries"] = nlohmann::ordered_json::array();
  CHECK_THROWS_AS(forceplot_svg(Report::wrap(empty_body)), ConfigError);
}

TEST_CASE("vanishing components render as near-zero-height segments") {
  // A no-cooperation entry: interaction and dependency bars collapse while
  // the standalone bars carry the stack.
  nlohmann::ordered_json body;
  body["schema_version"] = kReportSchemaVersion;
  body["command"] = "decompose";
  nlohmann::ordered_json entry;
  entry["group_a"] = std::vector<std::string>{"x1"};
  entry["group_b"] = std::vector<std::string>{"x2"};
  entry["v_j"] = 0.5;
  entry["v_jbar"] = 0.5;
  entry["v_joint"] = 1.0005;
  entry["psi"] = 0.0005;
  entry["interaction_surplus"] = 0.001;
  entry["dep"] = 0.0005;
  entry["cross_pred"] = 0.0002;
  entry["covariance"] = 0.0003;
  entry["var_y"] = 1.0;
  body["entries"] = nlohmann::ordered_json::array({entry});
  const Report report = Report::wrap(body);
  const std::string svg = forceplot_svg(report);

  auto rect_height_after = [&](const char* color) {
    const std::size_t fill_pos = svg.find(std::string("fill=\"") + color);
    REQUIRE(fill_pos != std::string::npos);
    const std::size_t rect_start = svg.rfind("<rect", fill_pos);
    const std::size_t h_pos = svg.find("height=\"", rect_start);
    return std::stod(svg.substr(h_pos + 8));
  };
  const double gray_h = rect_height_after(kStandaloneGray);
  const double green_h = rect_height_after(kInteractionGreen);
  const double purple_h = rect_height_after(kDependencePurple);
  CHECK(gray_h > 100.0);
  CHECK(green_h < 2.0);
  CHECK(purple_h < 2.0);
}

TEST_CASE("atomic write replaces the file completely") {
  atomic_write_file("./atomic.txt", "first");
  atomic_write_file("./atomic.txt", "second");
  std::ifstream in("./atomic.txt");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "second");
  std::remove("./atomic.txt");
}
