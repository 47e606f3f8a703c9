#pragma once

// Plain-text formats: atom tables, density tables and field CSVs.

#include <iosfwd>
#include <string>

#include "rlab/extension.hpp"
#include "rlab/measure.hpp"

namespace rlab {

// 17 significant digits, "inf"/"-inf"/"nan" for non-finite values.
std::string format_real(double value);

// One atom per line: point coordinates then weight, whitespace separated.
// Blank lines and lines starting with '#' are ignored when reading.
void write_atom_table(std::ostream& out, const DiscreteMeasure& measure);
DiscreteMeasure read_atom_table(std::istream& in);
DiscreteMeasure read_atom_table_file(const std::string& path);

// One coefficient per line: real part, imaginary part.
void write_density(std::ostream& out, const Density& density);
Density read_density(std::istream& in);
Density read_density_file(const std::string& path);

// Header x0,...,x{d-1},re,im,abs then one row per grid point in flat order.
void write_field_csv(std::ostream& out, const Field& field, const SpaceGrid& grid);

}  // namespace rlab
