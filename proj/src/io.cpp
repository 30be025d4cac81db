#include "firefit/io.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

namespace firefit {

namespace {

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && s[b] == ' ') ++b;
    return s.substr(b);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) out.push_back(trim(cell));
    return out;
}

double to_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("line " + std::to_string(line_no) + ": not a number: '" + s + "'");
    }
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("file not found: " + path.string());
    return is;
}

}  // namespace

std::vector<Perimeter> read_perimeters_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("perimeter CSV is empty");
    const std::string header = trim(line);
    const bool with_id = header == "x,y,time,perimeter_id";
    if (!with_id && header != "x,y,time") {
        throw IoError("perimeter CSV header must be x,y,time or x,y,time,perimeter_id");
    }
    std::vector<Perimeter> runs;
    std::map<long long, Perimeter> by_id;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != (with_id ? 4u : 3u)) {
            throw IoError("line " + std::to_string(line_no) + ": wrong number of columns");
        }
        const PerimeterPoint p{to_double(cells[0], line_no), to_double(cells[1], line_no),
                               to_double(cells[2], line_no)};
        if (with_id) {
            by_id[static_cast<long long>(to_double(cells[3], line_no))].points.push_back(p);
        } else if (runs.empty() || runs.back().points.back().time != p.time) {
            runs.push_back(Perimeter{{p}});
        } else {
            runs.back().points.push_back(p);
        }
    }
    if (with_id) {
        for (auto& [id, per] : by_id) runs.push_back(std::move(per));
    }
    return runs;
}

std::vector<Perimeter> read_perimeters_csv(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_perimeters_csv(is);
}

void write_perimeters_csv(std::ostream& os, const std::vector<Perimeter>& perimeters) {
    os << std::setprecision(17) << "x,y,time,perimeter_id\n";
    for (std::size_t n = 0; n < perimeters.size(); ++n) {
        for (const auto& p : perimeters[n].points) {
            os << p.x << ',' << p.y << ',' << p.time << ',' << n << '\n';
        }
    }
}

std::vector<DetectionRecord> read_detections_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || trim(line) != "x,y,t,flag") {
        throw IoError("detection CSV header must be x,y,t,flag");
    }
    std::vector<DetectionRecord> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != 4) {
            throw IoError("line " + std::to_string(line_no) + ": wrong number of columns");
        }
        DetectionRecord r;
        r.x = to_double(cells[0], line_no);
        r.y = to_double(cells[1], line_no);
        r.t = to_double(cells[2], line_no);
        try {
            r.flag = parse_flag(cells[3]);
        } catch (const InvalidArgument& e) {
            throw IoError("line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(r);
    }
    return out;
}

std::vector<DetectionRecord> read_detections_csv(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_detections_csv(is);
}

void write_detections_csv(std::ostream& os, const std::vector<DetectionRecord>& recs) {
    os << std::setprecision(17) << "x,y,t,flag\n";
    for (const auto& r : recs) {
        os << r.x << ',' << r.y << ',' << r.t << ',' << flag_name(r.flag) << '\n';
    }
}

void write_fit_report_csv(std::ostream& os, const FitReport& report) {
    os << std::setprecision(17) << "iteration,level,step,objective\n";
    for (const auto& r : report.history) {
        os << r.iteration << ',' << r.level << ',' << r.step << ',' << r.objective << '\n';
    }
}

void write_ignition_csv(std::ostream& os, const std::vector<RankedIgnition>& ranked) {
    os << std::setprecision(17) << "rank,x,y,t,loglik\n";
    for (std::size_t n = 0; n < ranked.size(); ++n) {
        const auto& r = ranked[n];
        os << n + 1 << ',' << r.candidate.x << ',' << r.candidate.y << ',' << r.candidate.t << ','
           << r.log_likelihood << '\n';
    }
}

}  // namespace firefit
