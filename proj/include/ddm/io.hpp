#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ddm/grid.hpp"

namespace ddm {

/// One named nodal array for a field dump.
struct NamedField {
    std::string name;
    std::vector<double> values; // grid node order, x fastest
};

/// Legacy VTK STRUCTURED_POINTS writer (ASCII). One POINT_DATA block with one
/// SCALARS section per field.
void write_vtk_structured_points(const std::filesystem::path& path, const StructuredGrid& grid,
                                 const std::vector<NamedField>& fields, const std::string& title);

/// CSV dump: header "x,y,<names...>", one row per node.
void write_field_csv(const std::filesystem::path& path, const StructuredGrid& grid,
                     const std::vector<NamedField>& fields);

} // namespace ddm
