#pragma once

#include "varicurv/geometry.hpp"

#include <filesystem>
#include <iosfwd>

namespace varicurv {

/// ASCII OFF. Faces with two vertices are polyline segments in the x3 = 0 plane
/// (ambient dimension 2); faces with three vertices are triangles in R^3.
/// Mixed face sizes and anything else throw ParseError with the offending line.
Mesh read_off(std::istream& in);
Mesh read_off_file(const std::filesystem::path& path);
void write_off(std::ostream& out, const Mesh& mesh);

} // namespace varicurv
