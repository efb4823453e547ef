#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "lerw/continuous.hpp"
#include "lerw/harmonic.hpp"
#include "lerw/loewner.hpp"

namespace lerw {

inline constexpr const char* kCodeVersion = "lerw " LERW_VERSION;
inline constexpr int kCsvSchemaVersion = 1;

// CSV dumps; doubles are written with 17 significant digits.
std::string path_csv(const std::vector<Complex>& pts);                 // x,y
std::string driving_csv(const DrivingFunction& xi);                   // t,xi
std::string trace_csv(const std::vector<double>& t, const std::vector<Complex>& z);  // t,x,y
std::string continuous_csv(const ContinuousRun& run);                 // t,u,X,dyJ
std::string field_csv(const HarmonicField& f, double frame_shift);    // x,y,value

DrivingFunction parse_driving_csv(const std::string& text);
std::vector<Complex> parse_path_csv(const std::string& text);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);

struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::uint64_t replicas = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;
    nlohmann::json summary = nlohmann::json::object();

    nlohmann::json to_json() const;
};

// Collects every manifest.json below dir into dir/report.json and returns it.
nlohmann::json run_report(const std::filesystem::path& dir);

}  // namespace lerw
