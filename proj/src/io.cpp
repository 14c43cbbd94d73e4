#include "sbpsat/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sbpsat/errors.hpp"

namespace sbpsat::io {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_complex(std::complex<double> z) {
  std::string s = format_double(z.real());
  s += z.imag() < 0.0 ? "-" : "+";
  s += format_double(std::abs(z.imag()));
  s += "i";
  return s;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string row;
  for (size_t k = 0; k < fields.size(); ++k) {
    if (k) row += ',';
    row += fields[k];
  }
  return row;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp + " for writing");
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw Error("short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp + " onto " + path);
}

void ensure_directory(const std::string& path) {
  if (path.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw Error("cannot create directory " + path);
}

}  // namespace sbpsat::io
