#pragma once

// Plain-text serialization. Scans and images carry their acquisition
// metadata in '# key=value' header lines followed by one whitespace-separated
// row of numbers per line. Doubles are printed with 17 significant digits so
// write -> read is bit-exact. Grayscale images export as binary PGM (P5).

#include "uwbim/core.hpp"
#include "uwbim/image_analysis.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace uwbim {

// Malformed content; line numbers are 1-based.
struct ParseError : std::runtime_error {
    int line_number;
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_number(line) {}
};

// Failure to open, read or write a stream.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline double parse_double(const std::string& text, int line) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ParseError(line, "expected a number, got '" + text + "'");
    return v;
}

inline long long parse_int(const std::string& text, int line) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw ParseError(line, "expected an integer, got '" + text + "'");
    return v;
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (const char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    return parts;
}

// Splits "# key=value"; returns false for plain comments.
inline bool header_entry(const std::string& line, std::string& key, std::string& value) {
    std::string body = trim(line.substr(1));
    const auto eq = body.find('=');
    if (eq == std::string::npos) return false;
    key = trim(body.substr(0, eq));
    value = trim(body.substr(eq + 1));
    return !key.empty() && key.find(' ') == std::string::npos;
}

inline std::vector<double> parse_number_row(const std::string& line, int line_no) {
    std::vector<double> row;
    const char* p = line.c_str();
    while (*p) {
        while (*p == ' ' || *p == '\t') ++p;
        if (!*p) break;
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p) throw ParseError(line_no, "expected a number");
        row.push_back(v);
        p = end;
    }
    return row;
}

}  // namespace detail

// ---------------------------------------------------------------- B-scans

inline void write_bscan(std::ostream& os, const BScan& bscan) {
    bscan.validate();
    os << "# uwbim bscan v1\n";
    os << "# dt_s=" << format_double(bscan.sampling.dt_s) << "\n";
    os << "# t_start_s=" << format_double(bscan.sampling.t_start_s) << "\n";
    os << "# x_mm=";
    for (int k = 0; k < bscan.rows(); ++k)
        os << (k ? "," : "") << format_double(bscan.geometry.x_positions_mm[static_cast<std::size_t>(k)]);
    os << "\n";
    os << "# c_mm_s=" << format_double(bscan.geometry.wave_speed_mm_per_s) << "\n";
    os << "# tx_offset_mm=" << format_double(bscan.geometry.tx_offset_mm.x) << ","
       << format_double(bscan.geometry.tx_offset_mm.z) << "\n";
    os << "# rx_offset_mm=" << format_double(bscan.geometry.rx_offset_mm.x) << ","
       << format_double(bscan.geometry.rx_offset_mm.z) << "\n";
    for (int k = 0; k < bscan.rows(); ++k) {
        for (int n = 0; n < bscan.cols(); ++n) os << (n ? " " : "") << format_double(bscan.scans(k, n));
        os << "\n";
    }
    if (!os) throw IoError("write_bscan: stream failure");
}

inline BScan read_bscan(std::istream& is) {
    std::map<std::string, std::string> header;
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            std::string key, value;
            if (detail::header_entry(t, key, value)) header[key] = value;
            continue;
        }
        rows.push_back(detail::parse_number_row(t, line_no));
        if (rows.size() > 1 && rows.back().size() != rows.front().size())
            throw ParseError(line_no, "ragged data row");
    }
    for (const char* key : {"dt_s", "t_start_s", "x_mm", "c_mm_s"})
        if (!header.count(key)) throw ParseError(line_no, std::string("missing header ") + key);

    BScan bscan;
    bscan.sampling.dt_s = detail::parse_double(header["dt_s"], line_no);
    bscan.sampling.t_start_s = detail::parse_double(header["t_start_s"], line_no);
    for (const auto& part : detail::split(header["x_mm"], ','))
        bscan.geometry.x_positions_mm.push_back(detail::parse_double(detail::trim(part), line_no));
    bscan.geometry.wave_speed_mm_per_s = detail::parse_double(header["c_mm_s"], line_no);
    for (const char* key : {"tx_offset_mm", "rx_offset_mm"}) {
        if (!header.count(key)) continue;  // optional, defaults to colocated antennas
        const auto parts = detail::split(header[key], ',');
        if (parts.size() != 2) throw ParseError(line_no, std::string(key) + " needs two values");
        Vec2& target = key[0] == 't' ? bscan.geometry.tx_offset_mm : bscan.geometry.rx_offset_mm;
        target.x = detail::parse_double(detail::trim(parts[0]), line_no);
        target.z = detail::parse_double(detail::trim(parts[1]), line_no);
    }
    if (rows.empty()) throw ParseError(line_no, "no data rows");
    if (rows.size() != bscan.geometry.x_positions_mm.size())
        throw ParseError(line_no, "row count does not match x_mm header");
    bscan.sampling.n_samples = static_cast<int>(rows.front().size());
    bscan.scans.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t n = 0; n < rows[k].size(); ++n)
            bscan.scans(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n)) = rows[k][n];
    bscan.validate();
    return bscan;
}

// ----------------------------------------------------------------- images

inline void write_image(std::ostream& os, const RadarImage& image) {
    image.validate();
    os << "# uwbim image v1\n";
    os << "# x_min_mm=" << format_double(image.grid.x_min_mm) << "\n";
    os << "# x_max_mm=" << format_double(image.grid.x_max_mm) << "\n";
    os << "# z_min_mm=" << format_double(image.grid.z_min_mm) << "\n";
    os << "# z_max_mm=" << format_double(image.grid.z_max_mm) << "\n";
    os << "# pixel_mm=" << format_double(image.grid.pixel_mm) << "\n";
    for (int i = 0; i < image.height(); ++i) {
        for (int j = 0; j < image.width(); ++j) os << (j ? " " : "") << format_double(image.values(i, j));
        os << "\n";
    }
    if (!os) throw IoError("write_image: stream failure");
}

inline RadarImage read_image(std::istream& is) {
    std::map<std::string, std::string> header;
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            std::string key, value;
            if (detail::header_entry(t, key, value)) header[key] = value;
            continue;
        }
        rows.push_back(detail::parse_number_row(t, line_no));
        if (rows.size() > 1 && rows.back().size() != rows.front().size())
            throw ParseError(line_no, "ragged data row");
    }
    for (const char* key : {"x_min_mm", "x_max_mm", "z_min_mm", "z_max_mm", "pixel_mm"})
        if (!header.count(key)) throw ParseError(line_no, std::string("missing header ") + key);

    RadarImage image;
    image.grid.x_min_mm = detail::parse_double(header["x_min_mm"], line_no);
    image.grid.x_max_mm = detail::parse_double(header["x_max_mm"], line_no);
    image.grid.z_min_mm = detail::parse_double(header["z_min_mm"], line_no);
    image.grid.z_max_mm = detail::parse_double(header["z_max_mm"], line_no);
    image.grid.pixel_mm = detail::parse_double(header["pixel_mm"], line_no);
    image.grid.validate();
    if (static_cast<int>(rows.size()) != image.grid.height())
        throw ParseError(line_no, "data row count does not match grid height");
    if (rows.empty() || static_cast<int>(rows.front().size()) != image.grid.width())
        throw ParseError(line_no, "data column count does not match grid width");
    image.values.resize(image.grid.height(), image.grid.width());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            image.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    image.validate();
    return image;
}

// ------------------------------------------------------------------- PGM

inline void write_pgm(std::ostream& os, const GrayImage& gray) {
    gray.validate();
    os << "P5\n" << gray.width() << " " << gray.height() << "\n255\n";
    for (int i = 0; i < gray.height(); ++i)
        for (int j = 0; j < gray.width(); ++j)
            os.put(static_cast<char>(static_cast<unsigned char>(gray.levels(i, j))));
    if (!os) throw IoError("write_pgm: stream failure");
}

inline Eigen::MatrixXi read_pgm(std::istream& is) {
    std::string magic;
    is >> magic;
    if (magic != "P5") throw ParseError(1, "not a binary PGM (P5) file");
    int w = 0, h = 0, maxval = 0;
    is >> w >> h >> maxval;
    if (!is || w < 1 || h < 1) throw ParseError(2, "bad PGM dimensions");
    if (maxval != 255) throw ParseError(2, "only 8-bit PGM supported");
    is.get();  // single whitespace after maxval
    Eigen::MatrixXi levels(h, w);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            const int ch = is.get();
            if (ch == EOF) throw ParseError(3, "truncated PGM data");
            levels(i, j) = ch;
        }
    }
    return levels;
}

// ---------------------------------------------------------------- reports

// Strip report plus the table of retained strips it was derived from.
struct StripTableRow {
    long long area_px = 0;
    double x_min_mm = 0.0;
    double x_max_mm = 0.0;
    double mean_level = 0.0;
};

struct AnalysisReport {
    StripReport summary;
    std::vector<StripTableRow> strips;
};

inline void write_strip_report(std::ostream& os, const AnalysisReport& report) {
    os << "# uwbim strip-report v1\n";
    os << "threshold = " << report.summary.threshold << "\n";
    os << "x1_mm = " << format_double(report.summary.x1_mm) << "\n";
    os << "x2_mm = " << format_double(report.summary.x2_mm) << "\n";
    os << "center_mm = " << format_double(report.summary.center_mm) << "\n";
    os << "reference_strip = " << report.summary.reference_strip << "\n";
    os << "strip_count = " << report.strips.size() << "\n";
    os << "# strip <id> <area_px> <x_min_mm> <x_max_mm> <mean_level>\n";
    for (std::size_t i = 0; i < report.strips.size(); ++i) {
        const auto& s = report.strips[i];
        os << "strip " << i << " " << s.area_px << " " << format_double(s.x_min_mm) << " "
           << format_double(s.x_max_mm) << " " << format_double(s.mean_level) << "\n";
    }
    if (!os) throw IoError("write_strip_report: stream failure");
}

inline AnalysisReport read_strip_report(std::istream& is) {
    AnalysisReport report;
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    long long strip_count = -1;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.rfind("strip ", 0) == 0) {
            const auto parts = detail::split(t, ' ');
            std::vector<std::string> fields;
            for (const auto& p : parts)
                if (!detail::trim(p).empty()) fields.push_back(detail::trim(p));
            if (fields.size() != 6) throw ParseError(line_no, "strip row needs 5 fields");
            StripTableRow row;
            row.area_px = detail::parse_int(fields[2], line_no);
            row.x_min_mm = detail::parse_double(fields[3], line_no);
            row.x_max_mm = detail::parse_double(fields[4], line_no);
            row.mean_level = detail::parse_double(fields[5], line_no);
            report.strips.push_back(row);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
        kv[detail::trim(t.substr(0, eq))] = detail::trim(t.substr(eq + 1));
    }
    for (const char* key : {"threshold", "x1_mm", "x2_mm", "center_mm", "reference_strip"})
        if (!kv.count(key)) throw ParseError(line_no, std::string("missing key ") + key);
    report.summary.threshold = static_cast<int>(detail::parse_int(kv["threshold"], line_no));
    report.summary.x1_mm = detail::parse_double(kv["x1_mm"], line_no);
    report.summary.x2_mm = detail::parse_double(kv["x2_mm"], line_no);
    report.summary.center_mm = detail::parse_double(kv["center_mm"], line_no);
    report.summary.reference_strip = static_cast<int>(detail::parse_int(kv["reference_strip"], line_no));
    if (kv.count("strip_count")) strip_count = detail::parse_int(kv["strip_count"], line_no);
    if (strip_count >= 0 && strip_count != static_cast<long long>(report.strips.size()))
        throw ParseError(line_no, "strip_count does not match strip rows");
    return report;
}

inline void write_displacement_report(std::ostream& os, const DisplacementReport& report) {
    os << "# uwbim displacement-report v1\n";
    os << "baseline_center_mm = " << format_double(report.baseline_center_mm) << "\n";
    os << "state_center_mm = " << format_double(report.state_center_mm) << "\n";
    os << "displacement_mm = " << format_double(report.displacement_mm) << "\n";
    if (report.actual_mm) os << "actual_mm = " << format_double(*report.actual_mm) << "\n";
    if (report.error_pct) os << "error_pct = " << format_double(*report.error_pct) << "\n";
    if (!os) throw IoError("write_displacement_report: stream failure");
}

inline DisplacementReport read_displacement_report(std::istream& is) {
    DisplacementReport report;
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
        kv[detail::trim(t.substr(0, eq))] = detail::trim(t.substr(eq + 1));
    }
    for (const char* key : {"baseline_center_mm", "state_center_mm", "displacement_mm"})
        if (!kv.count(key)) throw ParseError(line_no, std::string("missing key ") + key);
    report.baseline_center_mm = detail::parse_double(kv["baseline_center_mm"], line_no);
    report.state_center_mm = detail::parse_double(kv["state_center_mm"], line_no);
    report.displacement_mm = detail::parse_double(kv["displacement_mm"], line_no);
    if (kv.count("actual_mm")) report.actual_mm = detail::parse_double(kv["actual_mm"], line_no);
    if (kv.count("error_pct")) report.error_pct = detail::parse_double(kv["error_pct"], line_no);
    return report;
}

// ------------------------------------------------------------ file access

template <typename Writer>
void write_file(const std::string& path, Writer&& writer, bool binary = false) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw IoError("cannot open for writing: " + path);
    writer(os);
    os.flush();
    if (!os) throw IoError("write failed: " + path);
}

template <typename Reader>
auto read_file(const std::string& path, Reader&& reader, bool binary = false) {
    std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
    if (!is) throw IoError("cannot open for reading: " + path);
    return reader(is);
}

}  // namespace uwbim
