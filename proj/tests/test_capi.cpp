#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gaussito/gaussito.h"

TEST_CASE("version and catalog") {
  CHECK(std::string(gaussito_version()) == GAUSSITO_TEST_VERSION);
  size_t needed = 0;
  REQUIRE(gaussito_catalog_text(nullptr, 0, &needed) == GAUSSITO_OK);
  CHECK(needed > 1);
  std::vector<char> buf(needed);
  REQUIRE(gaussito_catalog_text(buf.data(), buf.size(), nullptr) == GAUSSITO_OK);
  CHECK(std::string(buf.data()).find("evanescent") != std::string::npos);
  char small[8];
  REQUIRE(gaussito_catalog_text(small, sizeof small, nullptr) == GAUSSITO_OK);
  CHECK(std::string(small).size() == 7);
}

TEST_CASE("process handle lifecycle") {
  gaussito_process* p = nullptr;
  REQUIRE(gaussito_process_create("jump_bm", R"({"jumps": [[0.5, 0.25]]})", &p) == GAUSSITO_OK);
  REQUIRE(p != nullptr);
  double v = 0.0;
  CHECK(gaussito_process_covariance(p, 0.5, GAUSSITO_SIDE_LEFT, 1.0, GAUSSITO_SIDE_AT, &v) == GAUSSITO_OK);
  CHECK(v == doctest::Approx(0.5));
  CHECK(gaussito_process_lambda(p, &v) == GAUSSITO_OK);
  CHECK(v == doctest::Approx(1.25));
  CHECK(gaussito_process_variance(p, 0.5, &v) == GAUSSITO_OK);
  CHECK(v == doctest::Approx(0.75));
  CHECK(gaussito_process_variance(p, 2.0, &v) == GAUSSITO_ERR_DOMAIN);
  CHECK(std::string(gaussito_last_error_message()).size() > 0);
  gaussito_process_destroy(p);
  gaussito_process_destroy(nullptr);
}

TEST_CASE("creation errors") {
  gaussito_process* p = reinterpret_cast<gaussito_process*>(0x1);
  CHECK(gaussito_process_create("nope", nullptr, &p) == GAUSSITO_ERR_INVALID_ARGUMENT);
  CHECK(p == nullptr);
  CHECK(gaussito_process_create("fbm", "{\"hurst\": 2}", &p) == GAUSSITO_ERR_INVALID_ARGUMENT);
  CHECK(gaussito_process_create("fbm", "{\"hurst\": ", &p) == GAUSSITO_ERR_CONFIG);
  CHECK(gaussito_process_create(nullptr, nullptr, &p) == GAUSSITO_ERR_INVALID_ARGUMENT);
  CHECK(gaussito_process_create("brownian", nullptr, nullptr) == GAUSSITO_ERR_INVALID_ARGUMENT);
}

TEST_CASE("numerics through the C interface") {
  gaussito_process* p = nullptr;
  REQUIRE(gaussito_process_create("brownian", nullptr, &p) == GAUSSITO_OK);
  double v = 0.0;
  CHECK(gaussito_planar_qv(p, 8, &v) == GAUSSITO_OK);
  CHECK(v == doctest::Approx(0.125));
  CHECK(gaussito_psi("x2", 0.05, 0.5, 1.0, 0, &v) == GAUSSITO_OK);
  CHECK(v == doctest::Approx(1.5));
  CHECK(gaussito_psi("x2", 0.05, -0.5, 1.0, 0, &v) == GAUSSITO_ERR_DOMAIN);
  CHECK(gaussito_last_error_message()[0] != '\0');
  CHECK(gaussito_psi("x2", 0.05, 0.5, 1.0, 0, &v) == GAUSSITO_OK);
  CHECK(gaussito_last_error_message()[0] == '\0');

  const double coeffs[] = {1.0};
  const double times[] = {1.0};
  gaussito_ito_terms t{};
  CHECK(gaussito_ito_residual(p, "x2", 0.05, coeffs, times, nullptr, 1, &t) == GAUSSITO_OK);
  CHECK(t.lhs == doctest::Approx(2.0));
  CHECK(std::abs(t.residual) < 1e-10);
  CHECK(t.converged == 1);
  CHECK(gaussito_ito_residual(p, "exp", 0.3, coeffs, times, nullptr, 1, &t) == GAUSSITO_ERR_CONFIG);
  gaussito_process_destroy(p);
}

TEST_CASE("scenario runs") {
  const auto dir = std::filesystem::temp_directory_path() / "gaussito-capi-test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "s.json";
  {
    std::ofstream os(path);
    os << R"({"schema_version": 1, "model": {"id": "brownian"}, "functions": ["x2"],
             "h": [[{"coeff": 1.0, "time": 1.0}]]})";
  }
  gaussito_run* run = nullptr;
  REQUIRE(gaussito_scenario_run(path.string().c_str(), (dir / "out").string().c_str(), 0, 0, 1, &run) ==
          GAUSSITO_OK);
  CHECK(gaussito_run_exit_code(run) == 0);
  CHECK(std::string(gaussito_run_summary(run)).find("1 passed, 0 failed") != std::string::npos);
  CHECK(std::filesystem::exists(gaussito_run_report_path(run)));
  gaussito_run_destroy(run);

  CHECK(gaussito_scenario_run((dir / "missing.json").string().c_str(), nullptr, 0, 0, 1, &run) ==
        GAUSSITO_ERR_CONFIG);
  CHECK(run == nullptr);
  CHECK(gaussito_run_exit_code(nullptr) == 2);
  std::filesystem::remove_all(dir);
}
