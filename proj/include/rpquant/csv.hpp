#ifndef RPQUANT_CSV_HPP
#define RPQUANT_CSV_HPP

#include <iosfwd>
#include <string>

#include "rpquant/types.hpp"

namespace rpquant {

/// Load a point set from CSV, one point per row, comma-separated decimal
/// floats. Rejects ragged rows; `skip_header` ignores the first line.
PointSet load_points_csv(const std::string& path, bool skip_header = false);
PointSet read_points_csv(std::istream& in, bool skip_header = false);

/// Write a point set as CSV with shortest round-trip float formatting.
void save_points_csv(const std::string& path, const Eigen::Ref<const PointSet>& points);
void write_points_csv(std::ostream& out, const Eigen::Ref<const PointSet>& points);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

} // namespace rpquant

#endif
