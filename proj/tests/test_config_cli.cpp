#include "doctest.h"
#include "nslab/artifacts.hpp"
#include "nslab/config.hpp"

#include <cstdio>
#include <fstream>

using namespace nslab;

namespace {

const char* kMinimal = R"({
  "N": 4, "nu": 0.5, "dt": 0.01, "T": 1.0, "seed": 7,
  "noise": {"modes": [
    {"k": [1,0], "q": 1.0}, {"k": [-1,0], "q": 1.0},
    {"k": [1,1], "q": 1.0}, {"k": [-1,-1], "q": 1.0}
  ]}
})";

}  // namespace

TEST_CASE("minimal config parses and builds an integrator") {
    ExperimentConfig cfg = parse_config(kMinimal);
    CHECK(cfg.trunc == 4);
    CHECK(cfg.integrator.nu == 0.5);
    CHECK(cfg.modes.size() == 4);
    Integrator integ = cfg.make_integrator();
    CHECK(integ.noise().e0() == doctest::Approx(4.0));
    CHECK(config_hash(cfg) == config_hash(parse_config(kMinimal)));
}

TEST_CASE("config errors carry field paths") {
    auto expect_field = [](const char* text, const char* field) {
        try {
            parse_config(text);
            FAIL_CHECK("expected ConfigError for field " << field);
        } catch (const ConfigError& e) {
            CHECK(e.field == field);
        }
    };
    expect_field(R"({"nu": 1.0, "dt": 0.1})", "N");
    expect_field(R"({"N": 4, "nu": 1.0, "dt": -1})", "dt");
    expect_field(R"({"N": 4, "nu": 1.0, "dt": 0.1, "noise": {"modes": [
        {"k": [1,0], "q": 1.0}, {"k": [-1,0], "q": 1.0}, {"k": [5,5], "q": 1.0}
    ]}})", "noise.modes[2]");
    expect_field(R"({"N": 4, "nu": 1.0, "dt": 0.1, "noise": {"modes": [
        {"k": [1,0], "q": 1.0}, {"k": [-1,0], "q": 1.0}, {"k": [1,0], "q": 2.0}
    ]}})", "noise.modes[2]");
    expect_field(R"({"N": 4, "nu": 1.0, "dt": 0.1, "noise": {"modes": [
        {"k": [1,0], "q": 1.0}, {"k": [-1,0], "q": 1.0}]},
        "experiment": {"cut": 2}})", "experiment.cut");
    expect_field("not json at all", "<document>");
}

TEST_CASE("csv writer emits deterministic round-trip numbers") {
    CsvWriter csv("csv_writer_test.csv", {"a", "b"});
    csv.comment("config_hash", "deadbeef");
    csv.row({1.0 / 3.0, 1e-17});
    csv.row({0.1, 123456789.123456789});
    csv.write();

    std::ifstream is("csv_writer_test.csv");
    std::string line;
    std::getline(is, line);
    CHECK(line == "# config_hash=deadbeef");
    std::getline(is, line);
    CHECK(line == "a,b");
    std::getline(is, line);
    double x = 0, y = 0;
    std::sscanf(line.c_str(), "%lf,%lf", &x, &y);
    CHECK(x == 1.0 / 3.0);  // exact round trip
    CHECK(y == 1e-17);
    std::remove("csv_writer_test.csv");
}

TEST_CASE("format_double picks the shortest exact form") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e100) == "1e+100");
    CHECK(format_double(0.0) == "0");
}
