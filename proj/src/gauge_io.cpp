#include "nlh/gauge_io.hpp"

#include "nlh/binary_io.hpp"

#include <fstream>
#include <vector>

namespace nlh::io {

namespace {

struct Header {
  std::int64_t group = 0;
  std::vector<int> dims;
  std::vector<double> h;
};

Header read_header(std::istream& is) {
  expect_magic(is, "NLHCONN1");
  Header hd;
  hd.group = read_i64(is);
  const std::int64_t n = read_i64(is);
  if (n < 2 || n > kMaxDim) throw Error("connection file: bad dimension " + std::to_string(n));
  for (std::int64_t a = 0; a < n; ++a) {
    const std::int64_t d = read_i64(is);
    if (d < 1 || d > (1 << 20)) throw Error("connection file: bad grid size");
    hd.dims.push_back(static_cast<int>(d));
  }
  for (std::int64_t a = 0; a < n; ++a) hd.h.push_back(read_f64(is));
  return hd;
}

template <class G>
gauge::LatticeConnection<G> read_links(std::istream& is, const Header& hd, ComplexPtr k) {
  if (hd.group != static_cast<std::int64_t>(G::id))
    throw Error(std::string("connection file holds a different group than ") + G::name);
  if (k->dim() != static_cast<int>(hd.dims.size())) throw Error("connection file: dimension mismatch");
  for (int a = 0; a < k->dim(); ++a)
    if (k->cells_along(a) != hd.dims[a] || k->spacing(a) != hd.h[a])
      throw Error("connection file: grid does not match the complex");
  gauge::LatticeConnection<G> conn(k);
  double buf[G::stored_reals];
  for (std::size_t e = 0; e < conn.num_links(); ++e) {
    for (double& x : buf) x = read_f64(is);
    conn.link(e) = G::from_reals(buf);
  }
  return conn;
}

}  // namespace

template <class G>
void write_connection(std::ostream& os, const gauge::LatticeConnection<G>& conn) {
  const Complex& k = conn.complex();
  os.write("NLHCONN1", 8);
  write_i64(os, static_cast<std::int64_t>(G::id));
  write_i64(os, k.dim());
  for (int a = 0; a < k.dim(); ++a) write_i64(os, k.cells_along(a));
  for (int a = 0; a < k.dim(); ++a) write_f64(os, k.spacing(a));
  double buf[G::stored_reals];
  for (std::size_t e = 0; e < conn.num_links(); ++e) {
    G::to_reals(conn.link(e), buf);
    for (double x : buf) write_f64(os, x);
  }
  if (!os) throw Error("failed writing connection");
}

template <class G>
gauge::LatticeConnection<G> read_connection(std::istream& is, ComplexPtr complex) {
  return read_links<G>(is, read_header(is), std::move(complex));
}

template <class G>
gauge::LatticeConnection<G> read_connection(std::istream& is) {
  const Header hd = read_header(is);
  auto k = std::make_shared<Complex>(GridSpec{hd.dims, hd.h, {}, {}});
  return read_links<G>(is, hd, k);
}

lie::GroupId peek_connection_group(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  return static_cast<lie::GroupId>(read_header(is).group);
}

template <class G>
void save_connection(const std::filesystem::path& path, const gauge::LatticeConnection<G>& conn) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  write_connection(os, conn);
}

template <class G>
gauge::LatticeConnection<G> load_connection(const std::filesystem::path& path, ComplexPtr complex) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  return complex ? read_connection<G>(is, std::move(complex)) : read_connection<G>(is);
}

#define NLH_IO_INSTANTIATE(G)                                                                       \
  template void write_connection<G>(std::ostream&, const gauge::LatticeConnection<G>&);             \
  template gauge::LatticeConnection<G> read_connection<G>(std::istream&, ComplexPtr);               \
  template gauge::LatticeConnection<G> read_connection<G>(std::istream&);                           \
  template void save_connection<G>(const std::filesystem::path&, const gauge::LatticeConnection<G>&); \
  template gauge::LatticeConnection<G> load_connection<G>(const std::filesystem::path&, ComplexPtr);

NLH_IO_INSTANTIATE(lie::SU2)
NLH_IO_INSTANTIATE(lie::SO3)

}  // namespace nlh::io
