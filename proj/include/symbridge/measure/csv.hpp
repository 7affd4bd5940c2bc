#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symbridge/linalg/matrix.hpp"
#include "symbridge/measure/measure.hpp"

namespace symbridge::csv {

// Metadata written as "# key=value" lines ahead of the data.
using Metadata = std::vector<std::pair<std::string, std::string>>;

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

double parse_double(std::string_view s);

Metadata grid_metadata(const Grid& grid);
Grid grid_from_metadata(const Metadata& meta);
// Throws std::invalid_argument naming the key when absent.
std::string metadata_value(const Metadata& meta, const std::string& key);

// One row per node: coordinates then density, with a mandatory header row.
void write_measure(std::ostream& out, const DiscreteMeasure& m, const Metadata& extra = {});
void write_measure(const std::filesystem::path& path, const DiscreteMeasure& m, const Metadata& extra = {});
DiscreteMeasure read_measure(std::istream& in);
DiscreteMeasure read_measure(const std::filesystem::path& path);

// Dense matrix, one row per line, preceded by metadata lines.
void write_matrix(std::ostream& out, const linalg::Matrix& m, const Metadata& meta);
void write_matrix(const std::filesystem::path& path, const linalg::Matrix& m, const Metadata& meta);

struct MatrixFile {
    Metadata meta;
    linalg::Matrix matrix;
};
MatrixFile read_matrix(std::istream& in);

// Generic table: metadata, header row, numeric rows.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows, const Metadata& meta = {});

}  // namespace symbridge::csv
