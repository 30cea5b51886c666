#include "rpquant/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "rpquant/errors.hpp"

namespace rpquant {

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

PointSet read_points_csv(std::istream& in, bool skip_header) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    Index width = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_header && line_no == 1) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<double> row;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (true) {
            while (p < end && *p == ' ') ++p;
            double v = 0.0;
            const auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc{})
                throw ParseError("csv: bad number at line " + std::to_string(line_no));
            row.push_back(v);
            p = res.ptr;
            while (p < end && *p == ' ') ++p;
            if (p == end) break;
            if (*p != ',')
                throw ParseError("csv: expected ',' at line " + std::to_string(line_no));
            ++p;
        }
        if (width < 0) width = static_cast<Index>(row.size());
        else if (static_cast<Index>(row.size()) != width)
            throw ParseError("csv: ragged row at line " + std::to_string(line_no) + " (got " +
                             std::to_string(row.size()) + " fields, expected " +
                             std::to_string(width) + ")");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw EmptySetError("csv: no data rows");

    PointSet points(static_cast<Index>(rows.size()), width);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (Index j = 0; j < width; ++j) points(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    return points;
}

PointSet load_points_csv(const std::string& path, bool skip_header) {
    std::ifstream in(path);
    if (!in) throw ParseError("csv: cannot open " + path);
    return read_points_csv(in, skip_header);
}

void write_points_csv(std::ostream& out, const Eigen::Ref<const PointSet>& points) {
    for (Index i = 0; i < points.rows(); ++i) {
        for (Index j = 0; j < points.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(points(i, j));
        }
        out << '\n';
    }
}

void save_points_csv(const std::string& path, const Eigen::Ref<const PointSet>& points) {
    std::ofstream out(path);
    if (!out) throw ParseError("csv: cannot open " + path + " for writing");
    write_points_csv(out, points);
}

} // namespace rpquant
