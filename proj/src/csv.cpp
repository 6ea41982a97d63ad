#include "changeauc/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace changeauc {

namespace {

std::string_view trim(std::string_view s) {
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

double parse_field(std::string_view field, long data_row, std::size_t col) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw Error(ErrorCode::parse_error,
                    "row " + std::to_string(data_row) + ", column " + std::to_string(col + 1) +
                        ": not a number: '" + std::string(field) + "'");
    if (!std::isfinite(value))
        throw Error(ErrorCode::parse_error, "row " + std::to_string(data_row) + ", column " +
                                                std::to_string(col + 1) +
                                                ": value is not finite");
    return value;
}

}  // namespace

CsvDataset load_csv(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);

    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    std::string line;
    long data_row = 0;
    bool expect_header = has_header;

    while (std::getline(in, line)) {
        std::string_view view = trim(line);
        if (view.empty()) continue;  // skip blank lines anywhere
        auto fields = split_fields(view);
        if (expect_header) {
            for (auto f : fields) header.emplace_back(f);
            width = fields.size();
            expect_header = false;
            continue;
        }
        ++data_row;
        if (width == 0) width = fields.size();
        if (fields.size() != width)
            throw Error(ErrorCode::parse_error,
                        "row " + std::to_string(data_row) + ": expected " + std::to_string(width) +
                            " fields, got " + std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j)
            row[j] = parse_field(fields[j], data_row, j);
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw Error(ErrorCode::empty_file, "no data rows in " + path);

    CsvDataset out;
    out.header = std::move(header);
    out.series = Series(static_cast<long>(rows.size()), static_cast<long>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double* dst = out.series.row(static_cast<long>(i) + 1);
        for (std::size_t j = 0; j < width; ++j) dst[j] = rows[i][j];
    }
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void save_series_csv(const std::string& path, const Series& series) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot open " + path + " for writing");
    for (long j = 0; j < series.p(); ++j) out << (j ? ",x" : "x") << (j + 1);
    out << '\n';
    for (long t = 1; t <= series.T(); ++t) {
        const double* row = series.row(t);
        for (long j = 0; j < series.p(); ++j) {
            if (j) out << ',';
            out << format_double(row[j]);
        }
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

void save_curve_csv(const std::string& path, const std::vector<long>& ks,
                    const std::vector<double>& values) {
    if (ks.size() != values.size())
        throw Error(ErrorCode::dim_mismatch, "curve index/value lengths differ");
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot open " + path + " for writing");
    out << "k,value\n";
    for (std::size_t i = 0; i < ks.size(); ++i)
        out << ks[i] << ',' << format_double(values[i]) << '\n';
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

}  // namespace changeauc
