#include "rlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "rlab/errors.hpp"

namespace rlab {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

// Splits non-comment lines into numbers; reports the 1-based line number.
std::vector<std::vector<double>> read_numeric_rows(std::istream& in, const char* what) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<double> row;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw InvalidArgument(std::string(what) + " line " + std::to_string(line_no) +
                              ": malformed number '" + token + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return in;
}

}  // namespace

void write_atom_table(std::ostream& out, const DiscreteMeasure& measure) {
  for (std::size_t j = 0; j < measure.size(); ++j) {
    for (double c : measure.point(j)) out << format_real(c) << ' ';
    out << format_real(measure.weight(j)) << '\n';
  }
}

DiscreteMeasure read_atom_table(std::istream& in) {
  const auto rows = read_numeric_rows(in, "atom table");
  if (rows.empty()) throw InvalidArgument("atom table is empty");
  const std::size_t columns = rows.front().size();
  if (columns < 2) throw InvalidArgument("atom table rows need a point and a weight");
  std::vector<Atom> atoms;
  atoms.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() != columns) throw InvalidArgument("atom table rows have inconsistent lengths");
    atoms.push_back(Atom{std::vector<double>(row.begin(), row.end() - 1), row.back()});
  }
  return build_custom(atoms, columns - 1);
}

DiscreteMeasure read_atom_table_file(const std::string& path) {
  auto in = open_input(path);
  return read_atom_table(in);
}

void write_density(std::ostream& out, const Density& density) {
  for (const Complex& c : density.coeffs) out << format_real(c.real()) << ' ' << format_real(c.imag()) << '\n';
}

Density read_density(std::istream& in) {
  Density d;
  for (const auto& row : read_numeric_rows(in, "density")) {
    if (row.size() != 2) throw InvalidArgument("density rows need a real and an imaginary part");
    d.coeffs.emplace_back(row[0], row[1]);
  }
  return d;
}

Density read_density_file(const std::string& path) {
  auto in = open_input(path);
  return read_density(in);
}

void write_field_csv(std::ostream& out, const Field& field, const SpaceGrid& grid) {
  require_matching(grid, field);
  for (std::size_t a = 0; a < grid.dim(); ++a) out << 'x' << a << ',';
  out << "re,im,abs\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    for (double x : grid.point(i)) out << format_real(x) << ',';
    const Complex v = field.values[i];
    out << format_real(v.real()) << ',' << format_real(v.imag()) << ',' << format_real(std::abs(v)) << '\n';
  }
}

}  // namespace rlab
