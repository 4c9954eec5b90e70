#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "hbar/acceptance.hpp"
#include "hbar/io.hpp"

using namespace hbar;

namespace {

std::string message(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("complex json") {
  const auto in = complex_from_json(R"({"coefficients": "F2",
    "generators": [{"id": "a", "action": 0, "degree": 0}, {"id": "b", "action": 0, "degree": 0},
                   {"id": "e", "action": 1, "degree": 1}],
    "boundary": [{"from": "e", "to": "a"}, {"from": "e", "to": "b"}]})");
  const auto& c = std::get<FilteredComplexF2>(in);
  CHECK(c.size() == 3);
  CHECK(c.boundary(2) == Chain{0, 1});
  CHECK(reduce_filtered_complex(c).barcode.total() == 2);

  const auto nov = complex_from_json(R"({"coefficients": "Novikov-F2",
    "generators": [{"id": "x", "action": 2}, {"id": "y", "action": 0}],
    "boundary": [{"from": "x", "to": "y", "exponents": [0.5, 1.5]}]})");
  CHECK(unpinned_barcode(std::get<NovikovComplex>(nov)) == UnpinnedBarcode{{2.5}, 0});

  CHECK(message([] { complex_from_json("{\n  \"coefficients\": \"F2\",\n  oops\n}"); }).find("line 3") !=
        std::string::npos);
  CHECK(message([] { complex_from_json(R"({"coefficients": "Z"})"); }).find("coefficients") != std::string::npos);
  CHECK(message([] { complex_from_json(R"({"coefficients": "F2", "generators": [{"id": "a"}]})"); })
            .find("generators[0]: missing field 'action'") != std::string::npos);
  CHECK(message([] {
          complex_from_json(R"({"coefficients": "F2", "generators": [{"id": "a", "action": 0}],
                                "boundary": [{"from": "a", "to": "q"}]})");
        }).find("unknown generator 'q'") != std::string::npos);
  CHECK(message([] {
          complex_from_json(R"({"coefficients": "F2", "generators": [{"id": "a", "action": 0}, {"id": "a", "action": 1}]})");
        }).find("duplicate") != std::string::npos);
  CHECK(message([] {
          complex_from_json(R"({"coefficients": "F2", "generators": [{"id": "lo", "action": 0}, {"id": "hi", "action": 1}],
                                "boundary": [{"from": "lo", "to": "hi"}]})");
        }).find("'lo'") != std::string::npos);
}

TEST_CASE("spec json") {
  CHECK(system_from_json(R"({"kind": "doubling"})").degree() == 2);
  CHECK(system_from_json(R"({"kind": "linear_torus", "matrix": [[2, 1], [1, 1]]})").matrix()[0][0] == 2);
  CHECK(system_from_json(R"({"kind": "rotation", "alpha": 0.25})").angle() == 0.25);
  CHECK(system_from_json(R"({"kind": "shift", "alphabet": 3})").alphabet() == 3);
  CHECK(system_from_json(R"({"kind": "custom_grid", "degree": 2, "table": [0, 0.1]})").kind() == SystemKind::CustomCircle);
  CHECK_THROWS_AS(system_from_json(R"({"kind": "linear_torus", "matrix": [[2, 1.5], [1, 1]]})"), Error);
  CHECK_THROWS_AS(system_from_json(R"({"kind": "tent"})"), Error);

  CHECK(rational_tori_count(profile_from_json(R"({"kind": "power", "c": 1, "p": 2})"), 4).total == 9);
  CHECK(rational_tori_count(profile_from_json(R"({"kind": "table", "slopes": [0, 2]})"), 4).total == 9);
  CHECK_THROWS_AS(profile_from_json(R"({"kind": "poly", "coeffs": [0, 0, -1]})"), Error);
  CHECK(ellipsoid_from_json(R"({"a": [1, 2]})").a.size() == 2);
  CHECK_THROWS_AS(ellipsoid_from_json(R"({"a": [1, -2]})"), Error);
  CHECK(std::holds_alternative<LatticeBasis>(toric_model_from_json(R"({"kind": "flat_torus", "v1": [1, 0], "v2": [0, 2]})")));
  CHECK(std::holds_alternative<EllipsoidSpec>(toric_model_from_json(R"({"a": [1]})")));
  CHECK(tomograph_from_json(R"({"kind": "lines", "r": 2})").measure() == doctest::Approx(4 * M_PI));
  CHECK(tomograph_from_json(R"({"kind": "translation", "r": 0.1, "core": [[0, 0], [0, 1]]})").space == ModelSpace::Torus);
  CHECK(tomograph_from_json(R"({"kind": "cylinder_graph", "d": 2, "r": 1})").space == ModelSpace::Cylinder);
}

TEST_CASE("files are written whole") {
  const auto dir = std::filesystem::temp_directory_path() / "hbar_io_test";
  std::filesystem::remove_all(dir);
  write_file((dir / "a" / "x.csv").string(), "k,count\n1,2\n");
  CHECK(read_file((dir / "a" / "x.csv").string()) == "k,count\n1,2\n");
  CHECK(!std::filesystem::exists(dir / "a" / "x.csv.tmp"));
  CHECK_THROWS_AS(read_file((dir / "missing").string()), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("suite names") {
  CHECK(suite_criteria("all").size() == 16);
  CHECK(suite_criteria("7") == std::vector<int>{7});
  CHECK(suite_criteria("fast").back() == 16);
  CHECK_THROWS_AS(suite_criteria("17"), Error);
  CHECK_THROWS_AS(suite_criteria("everything"), Error);
  const auto r = run_suite({1, 13, 16}, {});
  REQUIRE(r.size() == 3);
  for (const auto& x : r) CHECK(x.pass);
  CHECK(suite_report_json(r).find("\"passed\": 3") != std::string::npos);
}
