#pragma once

#include <string>
#include <vector>

#include "changeauc/types.hpp"

namespace changeauc {

// A parsed CSV: optional header names plus the numeric payload, rows in file
// order, one observation per row.
struct CsvDataset {
    std::vector<std::string> header;  // empty when the file had no header row
    Series series{1, 1};
};

// Reads a numeric CSV. Every row must have the same number of fields and every
// field must parse as a finite double. Row numbers in error messages are
// 1-based over data rows (the header, when present, is not counted).
CsvDataset load_csv(const std::string& path, bool has_header);

// Writes a series back out, full round-trip precision, with a generated
// header x1,...,xp.
void save_series_csv(const std::string& path, const Series& series);

// Writes a (k, value) table, e.g. an AUC or CUSUM curve over its grid.
void save_curve_csv(const std::string& path, const std::vector<long>& ks,
                    const std::vector<double>& values);

}  // namespace changeauc
