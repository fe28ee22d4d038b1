#include "nlh/cochain.hpp"

#include "nlh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlh {

Cochain::Cochain(ComplexPtr complex, int degree, int components)
    : complex_(std::move(complex)), degree_(degree), ncomp_(components) {
  if (!complex_) throw InvalidArgument("cochain needs a complex");
  if (degree_ < 0 || degree_ > complex_->dim())
    throw DegreeError("cochain degree " + std::to_string(degree_) + " outside [0, n]");
  if (ncomp_ < 1) throw InvalidArgument("cochain needs at least one component");
  values_.assign(complex_->num_cells(degree_) * ncomp_, 0.0);
}

Cochain::Cochain(ComplexPtr complex, int degree, int components, std::vector<double> values)
    : Cochain(std::move(complex), degree, components) {
  if (values.size() != values_.size())
    throw InvalidArgument("cochain value count " + std::to_string(values.size()) +
                          " does not match " + std::to_string(values_.size()));
  values_ = std::move(values);
}

double Cochain::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void Cochain::check_compatible(const Cochain& o) const {
  if (o.degree_ != degree_ || o.ncomp_ != ncomp_ || o.values_.size() != values_.size())
    throw InvalidArgument("cochains have different degree or shape");
}

Cochain& Cochain::operator+=(const Cochain& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Cochain& Cochain::operator-=(const Cochain& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Cochain& Cochain::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }
Cochain operator*(double s, Cochain a) { return a *= s; }

}  // namespace nlh
