#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace hwnroute::csv {

/// Shortest decimal that parses back to the same double.
std::string format(double v);

/// Comma-separated writer for plain fields (no quoting: fields must not
/// contain commas, quotes or newlines).
class Writer {
 public:
  Writer(const std::filesystem::path& path, const std::vector<std::string>& header, bool append = false);
  void row(const std::vector<std::string>& fields);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
};

Table read(const std::filesystem::path& path);
double parse_double(const std::string& field);

}  // namespace hwnroute::csv
