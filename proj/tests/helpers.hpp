#pragma once

#include "nlh/cochain.hpp"

#include <memory>
#include <random>

namespace test {

inline nlh::ComplexPtr grid(std::vector<int> dims, double h, std::vector<bool> periodic = {},
                            nlh::MetricSpec metric = nlh::MetricSpec::identity()) {
  nlh::GridSpec g;
  g.spacing.assign(dims.size(), h);
  g.periodic = periodic.empty() ? std::vector<bool>(dims.size(), false) : periodic;
  g.dims = std::move(dims);
  return std::make_shared<const nlh::Complex>(g, metric);
}

inline nlh::Cochain random_cochain(const nlh::ComplexPtr& k, int p, std::mt19937_64& rng, int comps = 1) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  nlh::Cochain c(k, p, comps);
  for (auto& v : c.values()) v = u(rng);
  return c;
}

/// Zeroes every cell that has a vertex within `band` layers of the box boundary.
inline void clear_boundary_band(nlh::Cochain& c, int band) {
  const auto& k = c.complex();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto cell = k.cell(c.degree(), i);
    bool near = false;
    for (int a = 0; a < k.dim(); ++a) {
      const int lo = cell.base[a];
      const int hi = lo + static_cast<int>((cell.mask >> a) & 1u);
      if (!k.periodic(a) && (lo < band || hi > k.cells_along(a) - band)) near = true;
    }
    if (near)
      for (auto& v : c.cell_values(i)) v = 0.0;
  }
}

}  // namespace test

#include "nlh/gauge.hpp"

#include <cmath>

namespace test {

/// Smooth non-abelian connection on a box: each axis gets a different
/// algebra direction mixture, so brackets do not vanish.
template <class G>
nlh::gauge::LatticeConnection<G> smooth_connection(const nlh::ComplexPtr& k, double amp) {
  nlh::Cochain a(k, 1, 3);
  for (std::size_t e = 0; e < a.size(); ++e) {
    const auto c = k->cell(1, e);
    const auto x = k->cell_center(1, e);
    const int ax = nlh::axes_of(c.mask)[0];
    const double s0 = std::sin(2.0 * x[0] + x[1]), s1 = std::cos(1.5 * x[1] - x[2]), s2 = std::sin(x[2] + 0.7 * x[0]);
    a.at(e, 0) = amp * (ax == 0 ? s1 : ax == 1 ? s2 : s0);
    a.at(e, 1) = amp * (ax == 0 ? s2 : ax == 1 ? s0 : s1);
    a.at(e, 2) = amp * (ax == 0 ? s0 : ax == 1 ? s1 : s2);
  }
  return nlh::gauge::connection_from_algebra<G>(a);
}

}  // namespace test
