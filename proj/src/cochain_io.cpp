#include "nlh/cochain_io.hpp"

#include "nlh/binary_io.hpp"
#include "nlh/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace nlh::io {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

double parse_double(const std::string& s, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw Error("cochain csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

long parse_long(const std::string& s, int line) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw Error("cochain csv line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

void check_header(const Complex& k, long degree, long n, const std::vector<long>& dims) {
  if (n != k.dim()) throw Error("cochain file dimension does not match the complex");
  for (int a = 0; a < k.dim(); ++a)
    if (dims[a] != k.cells_along(a)) throw Error("cochain file dims do not match the complex");
  if (degree < 0 || degree > n) throw DegreeError("cochain file has invalid degree");
}

template <class Stream>
Stream open_or_throw(const std::filesystem::path& path, std::ios::openmode mode) {
  Stream s(path, mode);
  if (!s) throw Error("cannot open " + path.string());
  return s;
}

}  // namespace

void write_cochain_csv(std::ostream& os, const Cochain& c) {
  const Complex& k = c.complex();
  os << c.degree() << ',' << k.dim();
  for (int a = 0; a < k.dim(); ++a) os << ',' << k.cells_along(a);
  os << '\n';
  char buf[32];
  for (std::size_t i = 0; i < c.size(); ++i) {
    os << i;
    for (int q = 0; q < c.components(); ++q) {
      std::snprintf(buf, sizeof buf, "%.17g", c.at(i, q));
      os << ',' << buf;
    }
    os << '\n';
  }
}

Cochain read_cochain_csv(std::istream& is, ComplexPtr complex) {
  std::string line;
  if (!std::getline(is, line)) throw Error("empty cochain csv");
  const auto head = split_csv(line);
  if (head.size() < 3) throw Error("cochain csv header too short");
  const long degree = parse_long(head[0], 1);
  const long n = parse_long(head[1], 1);
  if (static_cast<long>(head.size()) != 2 + n) throw Error("cochain csv header has wrong dims count");
  std::vector<long> dims;
  for (long a = 0; a < n; ++a) dims.push_back(parse_long(head[2 + a], 1));
  check_header(*complex, degree, n, dims);

  const std::size_t count = complex->num_cells(static_cast<int>(degree));
  std::vector<double> values;
  int components = 0;
  int lineno = 1;
  std::size_t expected = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() < 2) throw Error("cochain csv line " + std::to_string(lineno) + ": no components");
    if (components == 0) components = static_cast<int>(fields.size()) - 1;
    if (static_cast<int>(fields.size()) - 1 != components)
      throw Error("cochain csv line " + std::to_string(lineno) + ": inconsistent component count");
    if (parse_long(fields[0], lineno) != static_cast<long>(expected))
      throw Error("cochain csv line " + std::to_string(lineno) + ": cells out of order");
    for (int q = 0; q < components; ++q) values.push_back(parse_double(fields[1 + q], lineno));
    ++expected;
  }
  if (expected != count)
    throw Error("cochain csv has " + std::to_string(expected) + " rows, expected " + std::to_string(count));
  return Cochain(std::move(complex), static_cast<int>(degree), components, std::move(values));
}

void write_cochain_binary(std::ostream& os, const Cochain& c) {
  const Complex& k = c.complex();
  os.write("NLHCOCH1", 8);
  write_i64(os, c.degree());
  write_i64(os, k.dim());
  for (int a = 0; a < k.dim(); ++a) write_i64(os, k.cells_along(a));
  write_i64(os, c.components());
  write_i64(os, static_cast<std::int64_t>(c.size()));
  for (double v : c.values()) write_f64(os, v);
}

Cochain read_cochain_binary(std::istream& is, ComplexPtr complex) {
  expect_magic(is, "NLHCOCH1");
  const long degree = static_cast<long>(read_i64(is));
  const long n = static_cast<long>(read_i64(is));
  if (n < 1 || n > kMaxDim) throw Error("cochain binary has invalid dimension");
  std::vector<long> dims;
  for (long a = 0; a < n; ++a) dims.push_back(static_cast<long>(read_i64(is)));
  check_header(*complex, degree, n, dims);
  const auto components = read_i64(is);
  const auto count = read_i64(is);
  if (components < 1 || count != static_cast<std::int64_t>(complex->num_cells(static_cast<int>(degree))))
    throw Error("cochain binary has inconsistent counts");
  std::vector<double> values(static_cast<std::size_t>(count * components));
  for (double& v : values) v = read_f64(is);
  return Cochain(std::move(complex), static_cast<int>(degree), static_cast<int>(components), std::move(values));
}

void save_cochain_csv(const std::filesystem::path& path, const Cochain& c) {
  auto os = open_or_throw<std::ofstream>(path, std::ios::out | std::ios::trunc);
  write_cochain_csv(os, c);
}

Cochain load_cochain_csv(const std::filesystem::path& path, ComplexPtr complex) {
  auto is = open_or_throw<std::ifstream>(path, std::ios::in);
  return read_cochain_csv(is, std::move(complex));
}

void save_cochain_binary(const std::filesystem::path& path, const Cochain& c) {
  auto os = open_or_throw<std::ofstream>(path, std::ios::out | std::ios::binary | std::ios::trunc);
  write_cochain_binary(os, c);
}

Cochain load_cochain_binary(const std::filesystem::path& path, ComplexPtr complex) {
  auto is = open_or_throw<std::ifstream>(path, std::ios::in | std::ios::binary);
  return read_cochain_binary(is, std::move(complex));
}

}  // namespace nlh::io
