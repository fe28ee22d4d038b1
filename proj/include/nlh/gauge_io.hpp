#pragma once

#include "nlh/gauge.hpp"

#include <filesystem>
#include <iosfwd>

namespace nlh::io {

// Binary: magic NLHCONN1, int64 group id, int64 n, int64 dims[n], double h[n],
// then every link matrix in edge order as little-endian doubles (SU2: re/im
// pairs row-major, SO3: row-major).
template <class G>
void write_connection(std::ostream& os, const gauge::LatticeConnection<G>& conn);

/// Reads into the given complex after checking group and shape.
template <class G>
gauge::LatticeConnection<G> read_connection(std::istream& is, ComplexPtr complex);

/// Reads and builds a box complex (origin 0, not periodic) from the header.
template <class G>
gauge::LatticeConnection<G> read_connection(std::istream& is);

lie::GroupId peek_connection_group(const std::filesystem::path& path);

template <class G>
void save_connection(const std::filesystem::path& path, const gauge::LatticeConnection<G>& conn);
template <class G>
gauge::LatticeConnection<G> load_connection(const std::filesystem::path& path, ComplexPtr complex = nullptr);

}  // namespace nlh::io
