#include "smelab/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smelab/errors.hpp"

namespace sme {

namespace {

std::ofstream open_out(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw StructuralError("cannot open '" + path + "' for writing");
    return out;
}

std::vector<double> split_numbers(const std::string& line, const std::string& path, std::size_t lineno) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            if (cell == "inf") {
                out.push_back(INFINITY);
                continue;
            }
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
        }
    }
    return out;
}

}  // namespace

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_field_csv(std::ostream& os, const ScalarField& u, const std::vector<std::string>& meta) {
    for (const auto& m : meta) os << "# " << m << "\n";
    os << "x,y,u\n";
    const Grid2D& g = u.g();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.active(k)) continue;
        const Point p = g.coords(k);
        os << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(u[k]) << '\n';
    }
}

void write_field_csv(const std::string& path, const ScalarField& u, const std::vector<std::string>& meta) {
    auto out = open_out(path);
    write_field_csv(out, u, meta);
}

ScalarField read_field_csv(const std::string& path, const GridPtr& grid) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    ScalarField u(grid);
    std::vector<char> seen(grid->size(), 0);
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    const double h = grid->h();
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "x,y,u") throw ParseError(path + ": expected header 'x,y,u', got '" + line + "'");
            header = true;
            continue;
        }
        const auto v = split_numbers(line, path, lineno);
        if (v.size() != 3) throw ParseError(path + ":" + std::to_string(lineno) + ": expected 3 columns");
        const int i = int(std::lround(v[0] / h)), j = int(std::lround(v[1] / h));
        if (!grid->in_lattice(i, j) || std::abs(i * h - v[0]) > 1e-6 * h || std::abs(j * h - v[1]) > 1e-6 * h)
            throw ParseError(path + ":" + std::to_string(lineno) + ": point is not a node of the grid");
        const std::size_t k = grid->index(i, j);
        if (!grid->active(k)) throw ParseError(path + ":" + std::to_string(lineno) + ": node is outside the domain");
        u[k] = v[2];
        seen[k] = 1;
    }
    for (std::size_t k = 0; k < grid->size(); ++k)
        if (grid->active(k) && !seen[k]) throw ParseError(path + ": missing value for node " + std::to_string(k));
    return u;
}

void write_profile_csv(std::ostream& os, const RadialProfile& prof, const std::vector<std::string>& meta) {
    os << "# kind: " << prof.kind << "\n";
    os << "# m: " << prof.params.m << "\n# n: " << prof.params.n << "\n";
    os << "# launch_r: " << fmt(prof.launch_r) << "\n# launch_u: " << fmt(prof.launch_u) << "\n";
    os << "# step: " << fmt(prof.step) << "\n# stop_x: " << fmt(prof.stop_x) << "\n";
    os << "# error_estimate: " << fmt(prof.error_estimate) << "\n";
    std::size_t switch_index = 0;
    while (switch_index < prof.size() && prof.by_height[switch_index]) ++switch_index;
    os << "# height_parametrized_samples: " << switch_index << "\n";
    for (const auto& m : meta) os << "# " << m << "\n";
    os << "r,u,du_dr\n";
    for (std::size_t i = 0; i < prof.size(); ++i)
        os << fmt(prof.r[i]) << ',' << fmt(prof.u[i]) << ',' << fmt(prof.s[i]) << '\n';
}

void write_profile_csv(const std::string& path, const RadialProfile& prof, const std::vector<std::string>& meta) {
    auto out = open_out(path);
    write_profile_csv(out, prof, meta);
}

RadialProfile read_profile_csv(const std::string& path, const Params& p) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    RadialProfile prof;
    prof.params = p;
    prof.kind = "file";
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::size_t height_samples = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# kind: ", 0) == 0) prof.kind = line.substr(8);
            if (line.rfind("# height_parametrized_samples: ", 0) == 0)
                height_samples = std::size_t(std::stoul(line.substr(31)));
            continue;
        }
        if (!header) {
            if (line != "r,u,du_dr") throw ParseError(path + ": expected header 'r,u,du_dr'");
            header = true;
            continue;
        }
        const auto v = split_numbers(line, path, lineno);
        if (v.size() != 3) throw ParseError(path + ":" + std::to_string(lineno) + ": expected 3 columns");
        if (prof.size() && !(v[0] > prof.r.back()))
            throw ParseError(path + ":" + std::to_string(lineno) + ": r must increase strictly");
        prof.push(v[0], v[1], v[2], prof.size() < height_samples);
    }
    return prof;
}

void write_text(const std::string& path, const std::string& content) {
    auto out = open_out(path);
    out << content;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace sme
