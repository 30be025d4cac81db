#include "firefit/field_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace firefit {

namespace {

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

void write_esri_ascii(std::ostream& os, const ScalarField& f) {
    const Grid& g = f.grid();
    if (g.dx != g.dy) {
        throw InvalidArgument("ESRI ASCII needs dx == dy; use the CSV field format");
    }
    os << std::setprecision(17);
    os << "NCOLS " << g.nx << '\n'
       << "NROWS " << g.ny << '\n'
       << "XLLCORNER " << g.x0 - 0.5 * g.dx << '\n'
       << "YLLCORNER " << g.y0 - 0.5 * g.dy << '\n'
       << "CELLSIZE " << g.dx << '\n'
       << "NODATA_VALUE " << kNoData << '\n';
    for (std::size_t r = 0; r < g.ny; ++r) {
        const std::size_t j = g.ny - 1 - r;
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double v = f.at(i, j);
            if (i) os << ' ';
            os << (std::isfinite(v) ? v : kNoData);
        }
        os << '\n';
    }
}

ScalarField read_esri_ascii(std::istream& is) {
    std::map<std::string, double> header;
    bool center = false;
    for (int n = 0; n < 6; ++n) {
        std::string key;
        double value = 0.0;
        if (!(is >> key >> value)) throw IoError("truncated ESRI ASCII header");
        key = upper(key);
        if (key == "XLLCENTER" || key == "YLLCENTER") center = true;
        if (key == "XLLCENTER") key = "XLLCORNER";
        if (key == "YLLCENTER") key = "YLLCORNER";
        header[key] = value;
    }
    for (const char* k : {"NCOLS", "NROWS", "XLLCORNER", "YLLCORNER", "CELLSIZE", "NODATA_VALUE"}) {
        if (!header.count(k)) throw IoError(std::string("ESRI ASCII header lacks ") + k);
    }
    const double h = header["CELLSIZE"];
    const double shift = center ? 0.0 : 0.5 * h;
    const Grid g = make_grid(static_cast<std::size_t>(header["NCOLS"]),
                             static_cast<std::size_t>(header["NROWS"]), h, h,
                             header["XLLCORNER"] + shift, header["YLLCORNER"] + shift);
    const double nodata = header["NODATA_VALUE"];
    ScalarField f(g);
    for (std::size_t r = 0; r < g.ny; ++r) {
        const std::size_t j = g.ny - 1 - r;
        for (std::size_t i = 0; i < g.nx; ++i) {
            double v = 0.0;
            if (!(is >> v)) throw IoError("ESRI ASCII body has too few values");
            f.at(i, j) = v == nodata ? std::numeric_limits<double>::quiet_NaN() : v;
        }
    }
    return f;
}

void write_field_csv(std::ostream& os, const ScalarField& f) {
    const Grid& g = f.grid();
    os << std::setprecision(17) << "i,j,x,y,value\n";
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            os << i << ',' << j << ',' << g.x(i) << ',' << g.y(j) << ',' << f.at(i, j) << '\n';
        }
    }
}

ScalarField read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("i,j,x,y,value", 0) != 0) {
        throw IoError("field CSV must start with header i,j,x,y,value");
    }
    struct Row {
        std::size_t i, j;
        double x, y, v;
    };
    std::vector<Row> rows;
    std::size_t nx = 0, ny = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Row r{};
        char c1, c2, c3, c4;
        if (!(ls >> r.i >> c1 >> r.j >> c2 >> r.x >> c3 >> r.y >> c4 >> r.v)) {
            throw IoError("malformed field CSV row: " + line);
        }
        nx = std::max(nx, r.i + 1);
        ny = std::max(ny, r.j + 1);
        rows.push_back(r);
    }
    if (rows.size() != nx * ny || nx < 2 || ny < 2) throw IoError("field CSV is not a full grid");
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    for (const auto& r : rows) {
        if (r.i == 0 && r.j == 0) { x0 = r.x; y0 = r.y; }
        if (r.i == nx - 1 && r.j == ny - 1) { x1 = r.x; y1 = r.y; }
    }
    const Grid g = make_grid(nx, ny, (x1 - x0) / static_cast<double>(nx - 1),
                             (y1 - y0) / static_cast<double>(ny - 1), x0, y0);
    ScalarField f(g);
    for (const auto& r : rows) f.at(r.i, r.j) = r.v;
    return f;
}

std::filesystem::path save_field(const std::filesystem::path& path, const ScalarField& f) {
    std::filesystem::path out = path;
    const bool csv = f.grid().dx != f.grid().dy || path.extension() == ".csv";
    if (csv) out.replace_extension(".csv");
    std::ofstream os(out);
    if (!os) throw IoError("cannot open " + out.string() + " for writing");
    if (csv) {
        write_field_csv(os, f);
    } else {
        write_esri_ascii(os, f);
    }
    if (!os) throw IoError("failed writing " + out.string());
    return out;
}

ScalarField load_field(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("file not found: " + path.string());
    if (path.extension() == ".csv") return read_field_csv(is);
    return read_esri_ascii(is);
}

}  // namespace firefit
