#pragma once

#include "eplateau/mesh.hpp"

#include <filesystem>
#include <iosfwd>

namespace eplateau {

/// Wavefront OBJ: `v x y z` lines then `f i j k` with 1-based indices.
void write_obj(std::ostream& out, const TriMesh& mesh, const Configuration& x);
void write_obj(const std::filesystem::path& path, const TriMesh& mesh, const Configuration& x);

/// Reads `v` and `f` records; `f a/b/c` forms keep the position index, negative
/// indices count from the end, and polygons are fan-triangulated. Other records
/// are ignored. Throws Error on malformed input.
[[nodiscard]] DiskMesh read_obj(std::istream& in);
[[nodiscard]] DiskMesh read_obj(const std::filesystem::path& path);

/// ASCII PLY with vertex and face elements.
void write_ply(std::ostream& out, const TriMesh& mesh, const Configuration& x);
void write_ply(const std::filesystem::path& path, const TriMesh& mesh, const Configuration& x);

/// Per boundary vertex: index,s,kappa,kappa_n,kappa_g,turning.
void write_boundary_csv(std::ostream& out, const TriMesh& mesh, const Configuration& x);

} // namespace eplateau
