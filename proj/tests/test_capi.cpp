#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "stirap_c.h"

namespace fs = std::filesystem;

namespace {

// Scratch directory unique to this test binary run.
fs::path scratch() {
    fs::path d = fs::temp_directory_path() / "stirap_capi_test";
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("version string is exposed") {
    const char* v = stirap_version();
    REQUIRE(v != nullptr);
    CHECK(std::strlen(v) > 0);
}

TEST_CASE("default scenario create, save, load round trip") {
    stirap_scenario* sc = nullptr;
    REQUIRE(stirap_scenario_create_default(&sc) == 0);
    REQUIRE(sc != nullptr);

    fs::path cfg = scratch() / "roundtrip.json";
    CHECK(stirap_scenario_save(sc, cfg.string().c_str()) == 0);

    stirap_scenario* sc2 = nullptr;
    CHECK(stirap_scenario_load(cfg.string().c_str(), &sc2) == 0);
    REQUIRE(sc2 != nullptr);
    stirap_scenario_free(sc);
    stirap_scenario_free(sc2);
}

TEST_CASE("loading a missing file reports a configuration error") {
    stirap_scenario* sc = nullptr;
    int rc = stirap_scenario_load("/nonexistent/scenario.json", &sc);
    CHECK(rc == 2);
    CHECK(std::strlen(stirap_last_error()) > 0);
    CHECK(sc == nullptr);
}

TEST_CASE("setters validate their arguments") {
    stirap_scenario* sc = nullptr;
    REQUIRE(stirap_scenario_create_default(&sc) == 0);
    CHECK(stirap_scenario_set_tol(sc, 1e-9) == 0);
    CHECK(stirap_scenario_set_tol(sc, 0.5) == 2);
    CHECK(stirap_scenario_set_threads(sc, 2) == 0);
    CHECK(stirap_scenario_set_threads(sc, 0) == 2);
    CHECK(stirap_scenario_set_outdir(sc, "") == 2);
    CHECK(stirap_scenario_set_seed(sc, 7u) == 0);
    CHECK(stirap_scenario_set_tol(nullptr, 1e-9) == 2);
    stirap_scenario_free(sc);
}

TEST_CASE("verify --list prints check names without running") {
    stirap_scenario* sc = nullptr;
    REQUIRE(stirap_scenario_create_default(&sc) == 0);
    CHECK(stirap_cmd_verify(sc, 1, 0) == 0);
    std::string log = stirap_last_log();
    CHECK(log.find("precision-ordering") != std::string::npos);
    CHECK(log.find("linewidth-law") != std::string::npos);
    stirap_scenario_free(sc);
}

TEST_CASE("a fast acceptance criterion passes through the C surface") {
    stirap_scenario* sc = nullptr;
    REQUIRE(stirap_scenario_create_default(&sc) == 0);
    fs::path out = scratch() / "verify_out";
    REQUIRE(stirap_scenario_set_outdir(sc, out.string().c_str()) == 0);
    CHECK(stirap_cmd_verify(sc, 0, 10) == 0);
    std::string log = stirap_last_log();
    CHECK(log.find("PASS") != std::string::npos);
    CHECK(fs::exists(out / "verify_report.txt"));
    CHECK(stirap_cmd_verify(sc, 0, 11) == 2); // out-of-range criterion
    stirap_scenario_free(sc);
}

TEST_CASE("an unverifiable precision ordering fails verification") {
    // eps_r far below the integrator tolerance: the suite must refuse
    stirap_scenario* base = nullptr;
    REQUIRE(stirap_scenario_create_default(&base) == 0);
    fs::path cfg = scratch() / "badprec.json";
    REQUIRE(stirap_scenario_save(base, cfg.string().c_str()) == 0);
    stirap_scenario_free(base);

    nlohmann::json j;
    {
        std::ifstream f(cfg);
        f >> j;
    }
    j["tol"] = 1e-6;
    j["bounds"]["eps_r"] = 1e-8;
    j["outdir"] = (scratch() / "badprec_out").string();
    {
        std::ofstream f(cfg);
        f << j.dump(2);
    }

    stirap_scenario* sc = nullptr;
    REQUIRE(stirap_scenario_load(cfg.string().c_str(), &sc) == 0);
    CHECK(stirap_cmd_verify(sc, 0, 0) == 1);
    std::string log = stirap_last_log();
    CHECK(log.find("FAIL criterion 0") != std::string::npos);
    stirap_scenario_free(sc);
}

TEST_CASE("run command writes its tables") {
    stirap_scenario* base = nullptr;
    REQUIRE(stirap_scenario_create_default(&base) == 0);
    fs::path cfg = scratch() / "small.json";
    REQUIRE(stirap_scenario_save(base, cfg.string().c_str()) == 0);
    stirap_scenario_free(base);

    nlohmann::json j;
    {
        std::ifstream f(cfg);
        f >> j;
    }
    j["grid"]["points"] = 21; // keep the slice sweep cheap
    {
        std::ofstream f(cfg);
        f << j.dump(2);
    }

    stirap_scenario* sc = nullptr;
    REQUIRE(stirap_scenario_load(cfg.string().c_str(), &sc) == 0);
    fs::path out = scratch() / "run_out";
    REQUIRE(stirap_scenario_set_outdir(sc, out.string().c_str()) == 0);
    REQUIRE(stirap_scenario_set_threads(sc, 2) == 0);
    CHECK(stirap_cmd_run(sc, STIRAP_FRAME_ROTATING, 0) == 0);
    CHECK(fs::exists(out / "trajectory.txt"));
    CHECK(fs::exists(out / "slices.txt"));
    CHECK(fs::exists(out / "summary.txt"));
    stirap_scenario_free(sc);
}

TEST_CASE("bounds command emits structured records") {
    stirap_scenario* sc = nullptr;
    REQUIRE(stirap_scenario_create_default(&sc) == 0);
    fs::path out = scratch() / "bounds_out";
    REQUIRE(stirap_scenario_set_outdir(sc, out.string().c_str()) == 0);
    CHECK(stirap_cmd_bounds(sc) == 0);
    std::ifstream f(out / "bounds.txt");
    REQUIRE(f.good());
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(text.find("kind=dyson") != std::string::npos);
    CHECK(text.find("kind=eqtrans_total") != std::string::npos);
    CHECK(text.find("sequence dyson_sum=") != std::string::npos);
    stirap_scenario_free(sc);
}

TEST_CASE("sweep command validates its axis") {
    stirap_scenario* sc = nullptr;
    REQUIRE(stirap_scenario_create_default(&sc) == 0);
    double ladder[2] = {1.0, 2.0};
    CHECK(stirap_cmd_sweep(sc, "bogus_axis", ladder, 2) == 2);
    CHECK(std::strlen(stirap_last_log()) > 0);
    stirap_scenario_free(sc);
}
