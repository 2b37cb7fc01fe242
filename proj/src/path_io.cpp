#include "pathhedge/path_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace pathhedge {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_path_csv(const CadlagPath& path, const std::filesystem::path& csv_file,
                    const std::filesystem::path& manifest_file) {
    const CadlagPath flat = path.materialize();
    std::ofstream csv(csv_file);
    if (!csv) throw std::runtime_error("cannot write " + csv_file.string());
    csv << "t,value";
    for (int k = 1; k < flat.dim(); ++k) csv << ",value" << k + 1;
    csv << "\n";
    for (std::size_t i = 0; i < flat.breakpoint_count(); ++i) {
        csv << format_double(flat.breakpoint_time(i));
        const Vec v = flat.breakpoint_value(i);
        for (double x : v) csv << "," << format_double(x);
        csv << "\n";
    }

    nlohmann::json man;
    man["mode"] = flat.mode() == PathMode::step ? "step" : "linear";
    man["dim"] = flat.dim();
    {
        nlohmann::json j0 = nlohmann::json::array();
        for (double x : flat.initial_value()) j0.push_back(format_double(x));
        man["initial_value"] = j0;
    }
    nlohmann::json lefts = nlohmann::json::array();
    for (std::size_t i = 0; i < flat.breakpoint_count(); ++i) {
        const double t = flat.breakpoint_time(i);
        const Vec lv = flat.left_limit(t);
        const Vec v = flat.breakpoint_value(i);
        const bool linear_jump = flat.mode() == PathMode::linear && i > 0 && lv != v;
        if (linear_jump) {
            nlohmann::json e;
            e["t"] = format_double(t);
            nlohmann::json jv = nlohmann::json::array();
            for (double x : lv) jv.push_back(format_double(x));
            e["value"] = jv;
            lefts.push_back(e);
        }
    }
    man["left_values"] = lefts;
    std::ofstream mf(manifest_file);
    if (!mf) throw std::runtime_error("cannot write " + manifest_file.string());
    mf << man.dump(2) << "\n";
}

namespace {

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::runtime_error("bad number in path file: " + s);
    return v;
}

}  // namespace

CadlagPath read_path_csv(const std::filesystem::path& csv_file,
                         const std::filesystem::path& manifest_file) {
    std::ifstream mf(manifest_file);
    if (!mf) throw std::runtime_error("cannot read " + manifest_file.string());
    nlohmann::json man = nlohmann::json::parse(mf);
    const std::string mode_s = man.at("mode").get<std::string>();
    if (mode_s != "step" && mode_s != "linear")
        throw std::runtime_error("manifest mode must be step|linear");
    const PathMode mode = mode_s == "step" ? PathMode::step : PathMode::linear;
    const int dim = man.at("dim").get<int>();

    std::ifstream csv(csv_file);
    if (!csv) throw std::runtime_error("cannot read " + csv_file.string());
    std::string line;
    if (!std::getline(csv, line)) throw std::runtime_error("empty path file");
    std::vector<double> times;
    std::vector<Vec> values;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell));
        if (static_cast<int>(row.size()) != dim + 1)
            throw std::runtime_error("path row has wrong arity: " + line);
        times.push_back(row[0]);
        values.emplace_back(row.begin() + 1, row.end());
    }

    Vec x0;
    for (const auto& s : man.at("initial_value")) x0.push_back(parse_double(s.get<std::string>()));
    CadlagPath path = CadlagPath::make(mode, std::move(times), std::move(values), x0);
    for (const auto& e : man.at("left_values")) {
        const double t = parse_double(e.at("t").get<std::string>());
        Vec lv;
        for (const auto& s : e.at("value")) lv.push_back(parse_double(s.get<std::string>()));
        path = path.with_left_value(t, lv);
    }
    return path;
}

}  // namespace pathhedge
