#include "hwnroute/csv.hpp"

#include <charconv>
#include <sstream>

#include "hwnroute/error.hpp"

namespace hwnroute::csv {

std::string format(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void check_field(const std::string& f) {
  if (f.find_first_of(",\"\n\r") != std::string::npos) throw Error("csv field contains a separator: " + f);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header, bool append)
    : columns_(header.size()) {
  const bool existing = append && std::filesystem::exists(path) && std::filesystem::file_size(path) > 0;
  out_.open(path, append ? std::ios::app : std::ios::trunc);
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
  if (!existing) row(header);
}

void Writer::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw Error("csv row has the wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    check_field(fields[i]);
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
  if (!out_) throw Error("csv write failed");
}

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw Error("csv has no column " + name);
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  Table t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
    } else {
      if (fields.size() != t.header.size()) throw ParseError("csv row width differs from header", lineno);
      t.rows.push_back(std::move(fields));
    }
  }
  if (t.header.empty()) throw Error("csv file " + path.string() + " is empty");
  return t;
}

double parse_double(const std::string& field) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) throw Error("not a number: " + field);
  return v;
}

}  // namespace hwnroute::csv
