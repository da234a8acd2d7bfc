#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

namespace hwnroute {

/// Dense, reciprocal table of complex channel gains indexed by
/// (node i, node j, resource r) with i != j. Stands in for channels that
/// come from an external propagation tool.
class GainGrid {
 public:
  GainGrid(int nodes, int resources);

  int node_count() const { return nodes_; }
  int resource_count() const { return resources_; }

  /// Stores the gain for both (i, j) and (j, i).
  void set(int i, int j, int r, std::complex<double> g);
  std::complex<double> at(int i, int j, int r) const;
  bool has(int i, int j, int r) const;
  bool complete() const;

  friend bool operator==(const GainGrid&, const GainGrid&) = default;

 private:
  std::size_t index(int i, int j, int r) const;

  int nodes_;
  int resources_;
  std::vector<std::complex<double>> gains_;
  std::vector<char> present_;
};

/// Parses the text grid format (see docs/formats.md). Throws ParseError with
/// the offending line on malformed headers or entries, duplicates, and
/// incomplete tables.
GainGrid load_gain_grid(std::istream& in);

/// Canonical writer: header, then one line per unordered pair i < j and
/// resource r, in (i, j, r) lexicographic order, shortest round-trip decimals.
void write_gain_grid(std::ostream& out, const GainGrid& grid);

}  // namespace hwnroute
