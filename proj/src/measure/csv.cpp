#include "symbridge/measure/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace symbridge::csv {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void write_meta(std::ostream& out, const Metadata& meta) {
    for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
}

double parse_double_impl(std::string_view s) {
    double v = 0.0;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) throw std::invalid_argument("csv: malformed number '" + std::string(s) + "'");
    return v;
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
        const auto comma = line.find(',', start);
        const auto end = comma == std::string::npos ? line.size() : comma;
        row.push_back(parse_double_impl(std::string_view(line).substr(start, end - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return row;
}

std::string lookup(const Metadata& meta, const std::string& key) {
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    throw std::invalid_argument("csv: missing metadata key '" + key + "'");
}

}  // namespace

double parse_double(std::string_view s) { return parse_double_impl(s); }

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string metadata_value(const Metadata& meta, const std::string& key) { return lookup(meta, key); }

Grid grid_from_metadata(const Metadata& meta) {
    const std::size_t dim = std::stoul(lookup(meta, "dim"));
    const std::size_t n = std::stoul(lookup(meta, "points_per_axis"));
    std::vector<Interval> bounds;
    for (std::size_t a = 0; a < dim; ++a) {
        const auto b = lookup(meta, "bounds" + std::to_string(a));
        const auto colon = b.find(':');
        bounds.push_back({parse_double_impl(b.substr(0, colon)), parse_double_impl(b.substr(colon + 1))});
    }
    return Grid(std::move(bounds), n);
}

Metadata grid_metadata(const Grid& grid) {
    Metadata meta;
    meta.emplace_back("dim", std::to_string(grid.dim()));
    meta.emplace_back("points_per_axis", std::to_string(grid.points_per_axis()));
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        meta.emplace_back("bounds" + std::to_string(a),
                          format_double(grid.bounds()[a].lower) + ":" + format_double(grid.bounds()[a].upper));
    }
    meta.emplace_back("cell_volume", format_double(grid.cell_volume()));
    return meta;
}

void write_measure(std::ostream& out, const DiscreteMeasure& m, const Metadata& extra) {
    out << "# symbridge discrete_measure\n";
    write_meta(out, grid_metadata(m.grid()));
    out << "# is_probability=" << (m.is_probability() ? 1 : 0) << '\n';
    write_meta(out, extra);
    const Grid& g = m.grid();
    for (std::size_t a = 0; a < g.dim(); ++a) out << 'x' << a << ',';
    out << "weight\n";
    Point p(g.dim());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.node(i, p);
        for (double c : p) out << format_double(c) << ',';
        out << format_double(m.density(i)) << '\n';
    }
}

void write_measure(const std::filesystem::path& path, const DiscreteMeasure& m, const Metadata& extra) {
    auto out = open_out(path);
    write_measure(out, m, extra);
}

DiscreteMeasure read_measure(std::istream& in) {
    Metadata meta;
    std::string line;
    bool header_seen = false;
    std::vector<double> weights;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) meta.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        weights.push_back(parse_row(line).back());
    }
    if (!header_seen) throw std::invalid_argument("csv: missing header row");
    const bool prob = lookup(meta, "is_probability") == "1";
    return DiscreteMeasure(grid_from_metadata(meta), std::move(weights), prob);
}

DiscreteMeasure read_measure(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_measure(in);
}

void write_matrix(std::ostream& out, const linalg::Matrix& m, const Metadata& meta) {
    write_meta(out, meta);
    out << "# rows=" << m.rows() << "\n# cols=" << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
}

void write_matrix(const std::filesystem::path& path, const linalg::Matrix& m, const Metadata& meta) {
    auto out = open_out(path);
    write_matrix(out, m, meta);
}

MatrixFile read_matrix(std::istream& in) {
    MatrixFile file;
    std::string line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) file.meta.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
            continue;
        }
        rows.push_back(parse_row(line));
    }
    const std::size_t r = std::stoul(lookup(file.meta, "rows"));
    const std::size_t c = std::stoul(lookup(file.meta, "cols"));
    if (rows.size() != r) throw std::invalid_argument("csv: row count mismatch");
    file.matrix = linalg::Matrix(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw std::invalid_argument("csv: column count mismatch");
        for (std::size_t j = 0; j < c; ++j) file.matrix(i, j) = rows[i][j];
    }
    return file;
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows, const Metadata& meta) {
    auto out = open_out(path);
    write_meta(out, meta);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
}

}  // namespace symbridge::csv
