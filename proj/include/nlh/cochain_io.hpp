#pragma once

#include "nlh/cochain.hpp"

#include <filesystem>
#include <iosfwd>

namespace nlh::io {

// CSV: header `degree,n,dims...`, then one row `cell_index,component...` per
// cell, values printed with 17 significant digits so reloading is exact.
void write_cochain_csv(std::ostream& os, const Cochain& c);
Cochain read_cochain_csv(std::istream& is, ComplexPtr complex);

// Binary: magic NLHCOCH1, int64 degree, n, dims[n], components, count, then
// count*components little-endian doubles.
void write_cochain_binary(std::ostream& os, const Cochain& c);
Cochain read_cochain_binary(std::istream& is, ComplexPtr complex);

void save_cochain_csv(const std::filesystem::path& path, const Cochain& c);
Cochain load_cochain_csv(const std::filesystem::path& path, ComplexPtr complex);
void save_cochain_binary(const std::filesystem::path& path, const Cochain& c);
Cochain load_cochain_binary(const std::filesystem::path& path, ComplexPtr complex);

}  // namespace nlh::io
