#include "ddm/io.hpp"

#include <fstream>

#include "ddm/errors.hpp"

namespace ddm {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    return os;
}

} // namespace

void write_vtk_structured_points(const std::filesystem::path& path, const StructuredGrid& grid,
                                 const std::vector<NamedField>& fields, const std::string& title) {
    auto os = open_out(path);
    os.precision(12);
    os << "# vtk DataFile Version 3.0\n";
    os << title << "\n";
    os << "ASCII\n";
    os << "DATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << grid.nx + 1 << ' ' << grid.ny + 1 << " 1\n";
    os << "ORIGIN " << grid.bounds.x0 << ' ' << grid.bounds.y0 << " 0\n";
    os << "SPACING " << grid.hx() << ' ' << grid.hy() << " 1\n";
    os << "POINT_DATA " << grid.num_nodes() << "\n";
    for (const auto& f : fields) {
        if (static_cast<int>(f.values.size()) != grid.num_nodes())
            throw IoError("vtk writer: field '" + f.name + "' has wrong length");
        os << "SCALARS " << f.name << " double 1\n";
        os << "LOOKUP_TABLE default\n";
        for (std::size_t i = 0; i < f.values.size(); ++i)
            os << f.values[i] << ((i + 1) % 6 == 0 ? '\n' : ' ');
        if (f.values.size() % 6 != 0) os << '\n';
    }
    if (!os) throw IoError("write failed: " + path.string());
}

void write_field_csv(const std::filesystem::path& path, const StructuredGrid& grid,
                     const std::vector<NamedField>& fields) {
    auto os = open_out(path);
    os.precision(17);
    os << "x,y";
    for (const auto& f : fields) os << ',' << f.name;
    os << '\n';
    for (int j = 0; j <= grid.ny; ++j) {
        for (int i = 0; i <= grid.nx; ++i) {
            const Vec2 p = grid.node(i, j);
            os << p.x << ',' << p.y;
            for (const auto& f : fields)
                os << ',' << f.values[static_cast<std::size_t>(grid.node_index(i, j))];
            os << '\n';
        }
    }
    if (!os) throw IoError("write failed: " + path.string());
}

} // namespace ddm
