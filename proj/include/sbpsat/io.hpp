#pragma once

#include <complex>
#include <string>
#include <vector>

namespace sbpsat::io {

// 17 significant digits, '.' decimal, locale-free; round-trips doubles.
std::string format_double(double v);
std::string format_complex(std::complex<double> z);  // "a+bi"

// Joins one CSV row; no quoting (fields are numeric or plain words).
std::string csv_row(const std::vector<std::string>& fields);

// Writes to a sibling temp file, then renames onto path.
void write_file_atomic(const std::string& path, const std::string& content);

void ensure_directory(const std::string& path);

}  // namespace sbpsat::io
