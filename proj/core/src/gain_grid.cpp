#include "hwnroute/gain_grid.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "hwnroute/error.hpp"

namespace hwnroute {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

int parse_header_field(std::string_view field, std::string_view key, std::size_t line) {
  if (field.substr(0, key.size()) != key || field.size() <= key.size() || field[key.size()] != '=') {
    throw ParseError("malformed header: expected '" + std::string(key) + "=<count>'", line);
  }
  int value = 0;
  if (!parse_number(field.substr(key.size() + 1), value) || value < 0) {
    throw ParseError("malformed header: bad " + std::string(key) + " count", line);
  }
  return value;
}

void write_double(std::ostream& out, double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.write(buf.data(), ptr - buf.data());
}

}  // namespace

GainGrid::GainGrid(int nodes, int resources) : nodes_(nodes), resources_(resources) {
  if (nodes < 2 || resources < 1) throw Error("gain grid needs >= 2 nodes and >= 1 resource");
  const std::size_t n = static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes) *
                        static_cast<std::size_t>(resources);
  gains_.assign(n, {0.0, 0.0});
  present_.assign(n, 0);
}

std::size_t GainGrid::index(int i, int j, int r) const {
  if (i < 0 || i >= nodes_ || j < 0 || j >= nodes_ || r < 0 || r >= resources_ || i == j) {
    throw Error("gain grid index out of range");
  }
  return (static_cast<std::size_t>(i) * static_cast<std::size_t>(nodes_) + static_cast<std::size_t>(j)) *
             static_cast<std::size_t>(resources_) +
         static_cast<std::size_t>(r);
}

void GainGrid::set(int i, int j, int r, std::complex<double> g) {
  gains_[index(i, j, r)] = g;
  gains_[index(j, i, r)] = g;
  present_[index(i, j, r)] = 1;
  present_[index(j, i, r)] = 1;
}

std::complex<double> GainGrid::at(int i, int j, int r) const {
  const std::size_t k = index(i, j, r);
  if (!present_[k]) throw Error("gain grid entry missing");
  return gains_[k];
}

bool GainGrid::has(int i, int j, int r) const { return present_[index(i, j, r)] != 0; }

bool GainGrid::complete() const {
  for (int i = 0; i < nodes_; ++i) {
    for (int j = 0; j < nodes_; ++j) {
      if (i == j) continue;
      for (int r = 0; r < resources_; ++r) {
        if (!present_[index(i, j, r)]) return false;
      }
    }
  }
  return true;
}

GainGrid load_gain_grid(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  auto next_nonblank = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!split_fields(line).empty()) return true;
    }
    return false;
  };

  if (!next_nonblank()) throw ParseError("malformed header: empty input", line_no);
  const auto header = split_fields(line);
  if (header.size() != 2) throw ParseError("malformed header: expected 'nodes=<N> resources=<R>'", line_no);
  const int nodes = parse_header_field(header[0], "nodes", line_no);
  const int resources = parse_header_field(header[1], "resources", line_no);
  if (nodes < 2 || resources < 1) {
    throw ParseError("malformed header: need nodes >= 2 and resources >= 1", line_no);
  }

  GainGrid grid(nodes, resources);
  while (next_nonblank()) {
    const auto fields = split_fields(line);
    if (fields.size() != 5) throw ParseError("malformed entry: expected 'i j r re im'", line_no);
    int i = 0, j = 0, r = 0;
    double re = 0.0, im = 0.0;
    if (!parse_number(fields[0], i) || !parse_number(fields[1], j) || !parse_number(fields[2], r)) {
      throw ParseError("malformed entry: bad index", line_no);
    }
    if (!parse_number(fields[3], re) || !parse_number(fields[4], im)) {
      throw ParseError("malformed entry: bad gain value", line_no);
    }
    if (i < 0 || i >= nodes || j < 0 || j >= nodes || r < 0 || r >= resources) {
      throw ParseError("malformed entry: index out of range", line_no);
    }
    if (i == j) throw ParseError("malformed entry: self link", line_no);
    if (grid.has(i, j, r)) throw ParseError("duplicate entry", line_no);
    grid.set(i, j, r, {re, im});
  }
  if (!grid.complete()) throw ParseError("incomplete grid", line_no);
  return grid;
}

void write_gain_grid(std::ostream& out, const GainGrid& grid) {
  out << "nodes=" << grid.node_count() << " resources=" << grid.resource_count() << '\n';
  for (int i = 0; i < grid.node_count(); ++i) {
    for (int j = i + 1; j < grid.node_count(); ++j) {
      for (int r = 0; r < grid.resource_count(); ++r) {
        const auto g = grid.at(i, j, r);
        out << i << ' ' << j << ' ' << r << ' ';
        write_double(out, g.real());
        out << ' ';
        write_double(out, g.imag());
        out << '\n';
      }
    }
  }
}

}  // namespace hwnroute
