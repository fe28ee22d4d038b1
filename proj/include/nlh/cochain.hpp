#pragma once

#include "nlh/complex.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nlh {

using ComplexPtr = std::shared_ptr<const Complex>;

/// Values on the oriented p-cells of a complex.  Each cell carries `components`
/// reals: 1 for scalar forms, 3 for forms with values in su(2)/so(3).
class Cochain {
public:
  Cochain(ComplexPtr complex, int degree, int components = 1);
  Cochain(ComplexPtr complex, int degree, int components, std::vector<double> values);

  const Complex& complex() const { return *complex_; }
  const ComplexPtr& complex_ptr() const { return complex_; }
  int degree() const noexcept { return degree_; }
  int components() const noexcept { return ncomp_; }
  std::size_t size() const noexcept { return values_.size() / ncomp_; }

  double& at(std::size_t cell, int comp = 0) { return values_[cell * ncomp_ + comp]; }
  double at(std::size_t cell, int comp = 0) const { return values_[cell * ncomp_ + comp]; }
  std::span<double> cell_values(std::size_t cell) {
    return {values_.data() + cell * ncomp_, static_cast<std::size_t>(ncomp_)};
  }
  std::span<const double> cell_values(std::size_t cell) const {
    return {values_.data() + cell * ncomp_, static_cast<std::size_t>(ncomp_)};
  }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  double max_abs() const;
  Cochain& operator+=(const Cochain& o);
  Cochain& operator-=(const Cochain& o);
  Cochain& operator*=(double s);

private:
  void check_compatible(const Cochain& o) const;

  ComplexPtr complex_;
  int degree_;
  int ncomp_;
  std::vector<double> values_;
};

Cochain operator+(Cochain a, const Cochain& b);
Cochain operator-(Cochain a, const Cochain& b);
Cochain operator*(double s, Cochain a);

}  // namespace nlh
