#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "lerw/io.hpp"

using namespace lerw;

TEST_CASE("CSV round trips are exact") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n01;
    DrivingFunction d;
    double t = 0.0;
    for (int k = 0; k < 200; ++k) {
        d.t.push_back(t);
        d.xi.push_back(n01(rng) * 1e-3 + std::exp(n01(rng)));
        t += 1e-3 * (1.0 + std::abs(n01(rng)));
    }
    auto back = parse_driving_csv(driving_csv(d));
    CHECK(back.t == d.t);
    CHECK(back.xi == d.xi);

    std::vector<Complex> pts;
    for (int k = 0; k < 100; ++k) pts.emplace_back(n01(rng) / 3.0, std::abs(n01(rng)) * 1e-7);
    CHECK(parse_path_csv(path_csv(pts)) == pts);
}

TEST_CASE("CSV parse errors") {
    CHECK_THROWS_AS(parse_driving_csv("t,xi\n0,1\n0.1,abc\n"), ValidationError);
    CHECK_THROWS_AS(parse_driving_csv("t,xi\n0,1\n0,2\n"), ValidationError);
    CHECK_THROWS_AS(parse_path_csv("x,y\n"), ValidationError);
    CHECK_THROWS_AS(parse_path_csv("x,y\n1\n"), ValidationError);
    auto p = parse_path_csv("x,y\r\n0,0\r\n0,1\r\n");
    CHECK(p.size() == 2);
}

TEST_CASE("continuous CSV has one row per time and NaN in the last drift") {
    auto run = ContinuousLerw::halfplane(TargetImage{}, ContinuousOptions{}).run_with_noise({0.01, -0.02, 0.0});
    auto text = continuous_csv(run);
    CHECK(text.rfind("t,u,X,dyJ\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines == 1 + run.driving.size());
    CHECK(text.find("nan") != std::string::npos);
}

TEST_CASE("manifest carries seed, version and rng algorithm") {
    RunManifest m;
    m.command = "sample-lerw";
    m.seed = 7;
    m.replicas = 100;
    m.outputs = {"path_00000.csv"};
    auto j = m.to_json();
    CHECK(j["seed"] == 7);
    CHECK(j["replicas"] == 100);
    CHECK(j["code_version"] == std::string(kCodeVersion));
    CHECK(j["rng"]["algorithm"] == std::string(kRngAlgorithm));
    CHECK(j["csv_schema_version"] == kCsvSchemaVersion);
    CHECK(j["outputs"][0] == "path_00000.csv");
}

TEST_CASE("files are written with parent directories") {
    auto dir = std::filesystem::temp_directory_path() / "lerw_io_test" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    write_file(dir / "a.txt", "hello\n");
    CHECK(read_file(dir / "a.txt") == "hello\n");
    std::filesystem::remove_all(dir.parent_path());
    CHECK_THROWS_AS(read_file(dir / "a.txt"), ValidationError);
}
