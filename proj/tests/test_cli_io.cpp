#include <doctest.h>

#include <string>

#include "coagstat/config.hpp"

using namespace coag;

TEST_SUITE_BEGIN("cli_io");

namespace {

const char* kMinimal = R"({
  "dimension": 1,
  "kernel": {"family": "constant", "c": 1.0},
  "source": [{"composition": [1], "rate": 1.0}],
  "truncation": {"epsilon": 0.0, "M": 64}
})";

}  // namespace

TEST_CASE("minimal valid configuration parses") {
    RunConfig cfg = parse_config(kMinimal);
    CHECK(cfg.dimension == 1);
    CHECK(cfg.kernel.family == KernelFamily::Constant);
    CHECK(cfg.truncation.M == 64);
    CHECK(cfg.truncation.L == 1);
    CHECK(cfg.source().total_rate() == 1.0);
    CHECK(cfg.solver.steady_tol == 1e-8);  // defaulted
}

TEST_CASE("cutoff below twice the source reach is rejected, naming M > 2L") {
    std::string text = R"({
      "dimension": 1,
      "kernel": {"family": "constant", "c": 1.0},
      "source": [{"composition": [4], "rate": 1.0}],
      "truncation": {"epsilon": 0.1, "M": 2}
    })";
    try {
        (void)parse_config(text);
        FAIL_CHECK("expected a configuration error");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("M > 2L") != std::string::npos);
        CHECK(msg.find("L=4") != std::string::npos);
    }
}

TEST_CASE("negative source rates are rejected") {
    std::string text = R"({
      "dimension": 1,
      "kernel": {"family": "constant", "c": 1.0},
      "source": [{"composition": [1], "rate": -2.0}],
      "truncation": {"M": 64}
    })";
    CHECK_THROWS_AS((void)parse_config(text), ConfigError);
}

TEST_CASE("dimension mismatches are reported") {
    std::string text = R"({
      "dimension": 2,
      "kernel": {"family": "brownian", "volumes": [1.0]},
      "source": [{"composition": [1], "rate": 1.0}],
      "truncation": {"M": 64}
    })";
    CHECK_THROWS_AS((void)parse_config(text), ConfigError);
}

TEST_CASE("malformed JSON is a config error") {
    CHECK_THROWS_AS((void)parse_config("{ not json"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("{}"), ConfigError);  // missing kernel / truncation
}

TEST_CASE("parse-print-parse is idempotent") {
    std::string full = R"({
      "dimension": 2,
      "kernel": {"family": "product_power", "gamma": 0.0, "lambda": 0.25, "rescale_p": 0.25},
      "source": [{"composition": [1, 0], "rate": 3.0}, {"composition": [0, 1], "rate": 1.0}],
      "truncation": {"epsilon": 0.05, "M": 48},
      "solver": {"steady_tol": 1e-10, "dt_init": 0.01},
      "diagnostics": {"window_b": 0.5, "radii": [2, 4, 8]},
      "sweep": {"epsilon_list": [0.1, 0.01], "M_list": [16, 32, 64]},
      "seed": 7
    })";
    RunConfig a = parse_config(full);
    std::string printed = print_config(a);
    RunConfig b = parse_config(printed);
    CHECK(print_config(b) == printed);
    CHECK(b.kernel.rescale_exponent == 0.25);
    CHECK(b.solver.steady_tol == 1e-10);
    CHECK(b.sweep.M_list == std::vector<double>{16, 32, 64});
    CHECK(b.source_entries.size() == 2);
    CHECK(b.seed == 7);
}

TEST_SUITE_END();
