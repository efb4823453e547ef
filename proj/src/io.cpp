#include "lerw/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lerw/rng.hpp"

namespace lerw {

namespace {

void put(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

template <class... T>
void row(std::string& out, double first, T... rest) {
    put(out, first);
    ((out += ',', put(out, rest)), ...);
    out += '\n';
}

std::vector<std::vector<double>> parse_rows(const std::string& text, std::size_t cols) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> r;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                r.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ValidationError("CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (r.size() < cols) throw ValidationError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(cols) + " columns");
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace

std::string path_csv(const std::vector<Complex>& pts) {
    std::string s = "x,y\n";
    for (Complex z : pts) row(s, z.real(), z.imag());
    return s;
}

std::string driving_csv(const DrivingFunction& xi) {
    std::string s = "t,xi\n";
    for (std::size_t k = 0; k < xi.size(); ++k) row(s, xi.t[k], xi.xi[k]);
    return s;
}

std::string trace_csv(const std::vector<double>& t, const std::vector<Complex>& z) {
    std::string s = "t,x,y\n";
    for (std::size_t k = 0; k < std::min(t.size(), z.size()); ++k) row(s, t[k], z[k].real(), z[k].imag());
    return s;
}

std::string continuous_csv(const ContinuousRun& run) {
    std::string s = "t,u,X,dyJ\n";
    const double nan = std::nan("");
    for (std::size_t k = 0; k < run.driving.size(); ++k)
        row(s, run.driving.t[k], run.u[k], k < run.X.size() ? run.X[k] : nan, k < run.dyJ.size() ? run.dyJ[k] : nan);
    return s;
}

std::string field_csv(const HarmonicField& f, double shift) {
    std::string s = "x,y,value\n";
    const GridGraph& g = *f.grid;
    for (std::int64_t site = 0; site < g.num_sites(); ++site) {
        if (!g.is_vertex(site)) continue;
        const Complex z = g.site_position(site);
        row(s, z.real() + shift, z.imag(), f.at(site));
    }
    for (std::size_t k = 0; k < g.stubs().size(); ++k) {
        const Complex z = g.stubs()[k].z2;
        row(s, z.real() + shift, z.imag(), f.at(g.stub_vertex(k)));
    }
    return s;
}

DrivingFunction parse_driving_csv(const std::string& text) {
    DrivingFunction d;
    for (const auto& r : parse_rows(text, 2)) {
        d.t.push_back(r[0]);
        d.xi.push_back(r[1]);
    }
    d.validate();
    return d;
}

std::vector<Complex> parse_path_csv(const std::string& text) {
    std::vector<Complex> p;
    for (const auto& r : parse_rows(text, 2)) p.emplace_back(r[0], r[1]);
    if (p.empty()) throw ValidationError("empty path file");
    return p;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + p.string());
    out << content;
    if (!out) throw ValidationError("write failed for " + p.string());
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["seed"] = seed;
    j["replicas"] = replicas;
    j["code_version"] = kCodeVersion;
    j["rng"] = {{"algorithm", kRngAlgorithm}, {"version", kRngVersion}};
    j["csv_schema_version"] = kCsvSchemaVersion;
    j["wall_seconds"] = wall_seconds;
    j["outputs"] = outputs;
    j["summary"] = summary;
    return j;
}

nlohmann::json run_report(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    using nlohmann::json;
    if (!fs::exists(dir)) throw ValidationError("no such directory: " + dir.string());
    std::vector<fs::path> manifests;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() == "manifest.json") manifests.push_back(e.path());
    std::sort(manifests.begin(), manifests.end());
    json rows = json::array();
    for (const auto& p : manifests) {
        json m = json::parse(read_file(p));
        rows.push_back({{"manifest", fs::relative(p, dir).string()},
                        {"command", m.value("command", "")},
                        {"seed", m.value("seed", 0)},
                        {"replicas", m.value("replicas", 0)},
                        {"outputs", m["outputs"].size()},
                        {"summary", m.value("summary", json::object())}});
    }
    const json j = {{"runs", rows}, {"code_version", kCodeVersion}};
    write_file(dir / "report.json", j.dump(2) + "\n");
    return j;
}

}  // namespace lerw
