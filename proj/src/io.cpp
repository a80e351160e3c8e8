#include "gpimdp/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gpimdp/errors.h"

namespace gpimdp::io {

namespace {

std::vector<std::string> splitCsv(std::string const& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        auto const b = cell.find_first_not_of(" \t\r");
        auto const e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parseNumber(std::string const& s, std::filesystem::path const& path, std::size_t line) {
    double v = 0.0;
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw IoError("'" + path.string() + "' line " + std::to_string(line) + ": '" + s + "' is not a finite number");
    }
    return v;
}

}  // namespace

gp::Dataset readDataset(std::filesystem::path const& path, std::size_t stateDim, int actions) {
    std::ifstream in(path);
    if (!in) throw IoError("dataset file not found: '" + path.string() + "'");
    std::string line;
    std::size_t lineNo = 0;
    bool haveHeader = false;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.rfind('#', 0) != 0) {
            haveHeader = true;
            break;
        }
    }
    if (!haveHeader) throw IoError("dataset file '" + path.string() + "' is empty");
    auto const header = splitCsv(line);
    std::vector<std::string> expected;
    for (std::size_t i = 1; i <= stateDim; ++i) expected.push_back("x_" + std::to_string(i));
    expected.push_back("u");
    for (std::size_t i = 1; i <= stateDim; ++i) expected.push_back("xplus_" + std::to_string(i));
    if (header != expected) {
        std::string want;
        for (auto const& h : expected) want += (want.empty() ? "" : ",") + h;
        throw IoError("dataset file '" + path.string() + "' must have header " + want);
    }
    gp::Dataset data(stateDim, actions);
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line.rfind('#', 0) == 0) continue;
        auto const cells = splitCsv(line);
        if (cells.size() != expected.size()) throw IoError("'" + path.string() + "' line " + std::to_string(lineNo) + ": wrong number of columns");
        gp::Sample s;
        for (std::size_t i = 0; i < stateDim; ++i) s.x.push_back(parseNumber(cells[i], path, lineNo));
        double const u = parseNumber(cells[stateDim], path, lineNo);
        if (u != std::floor(u) || u < 0 || u >= actions) {
            throw IoError("'" + path.string() + "' line " + std::to_string(lineNo) + ": action must be an integer in [0, " + std::to_string(actions) + ")");
        }
        s.action = static_cast<int>(u);
        for (std::size_t i = 0; i < stateDim; ++i) s.next.push_back(parseNumber(cells[stateDim + 1 + i], path, lineNo));
        data.add(std::move(s));
    }
    return data;
}

std::string formatNumber(double v) {
    char buf[64];
    auto const [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

void writeDataset(std::ostream& out, gp::Dataset const& data) {
    std::size_t const n = data.stateDimension();
    for (std::size_t i = 1; i <= n; ++i) out << "x_" << i << ",";
    out << "u";
    for (std::size_t i = 1; i <= n; ++i) out << ",xplus_" << i;
    out << "\n";
    for (auto const& s : data.all()) {
        for (double v : s.x) out << formatNumber(v) << ",";
        out << s.action;
        for (double v : s.next) out << "," << formatNumber(v);
        out << "\n";
    }
}

void writeStrategy(std::ostream& out, Pimdp const& p, synthesis::ValueResult const& values) {
    out << "state_id,region_id,dfa_state,action,p_lower,p_upper\n";
    for (std::size_t s = 0; s < p.stateCount(); ++s) {
        auto const st = p.state(s);
        out << s << "," << st.cell << "," << st.dfa << "," << values.strategy[s] << "," << formatNumber(values.lower[s]) << ","
            << formatNumber(values.upper[s]) << "\n";
    }
}

void writeText(std::filesystem::path const& path, std::string const& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void writeJson(std::filesystem::path const& path, nlohmann::json const& j) { writeText(path, j.dump(2) + "\n"); }

}  // namespace gpimdp::io
