#pragma once

// Mass-density laws rho(Q) for the nonlinear Hodge energy and certification
// of the ellipticity bound
//
//   K^{-1} (Q + k)^q <= rho(Q) + 2 Q rho'(Q) <= K (Q + k)^q.

#include <optional>
#include <string>
#include <vector>

namespace nlh {

class DensityModel {
public:
  enum class Kind { Constant, Polytropic, MinimalSurface, Tabulated };

  /// rho == 1: the linear (Hodge-Kodaira / Yang-Mills) case.
  static DensityModel constant();
  /// rho = (1 - (gamma-1) Q / 2)^{1/(gamma-1)}, gamma > 1.
  static DensityModel polytropic(double gamma);
  /// rho = (1 + Q)^{-1/2}.
  static DensityModel minimal_surface();
  /// Monotone cubic (Fritsch-Carlson) interpolation through (Q_i, rho_i);
  /// Q_0 must be 0 and rho_i > 0.
  static DensityModel tabulated(std::vector<double> q, std::vector<double> rho);

  Kind kind() const noexcept { return kind_; }
  std::string name() const;
  double gamma() const noexcept { return gamma_; }
  /// Upper end of the domain (exclusive for polytropic, inclusive for tables).
  double q_max() const noexcept { return q_max_; }
  /// Q where rho + 2 Q rho' vanishes, if the model has one (polytropic).
  std::optional<double> q_crit() const;

  /// Throws DomainError naming Q_max when Q is outside the domain.
  void check_domain(double q) const;
  bool in_domain(double q) const noexcept;

  double rho(double q) const;
  double drho(double q) const;
  /// rho + 2 Q rho'.
  double ellipticity_margin(double q) const;
  /// W(Q) = integral_0^Q rho(s) ds.
  double stored_energy_integrand(double q) const;

private:
  DensityModel() = default;
  double table_eval(double q, bool derivative) const;
  double table_integral(double q) const;

  Kind kind_ = Kind::Constant;
  double gamma_ = 0.0;
  double q_max_ = 0.0;
  std::vector<double> tq_, trho_, tslope_;
};

struct EllipticityCertificate {
  double q_lo = 0.0;
  double q_hi = 0.0;
  double k = 0.0;
  double q_exponent = 0.0;
  std::size_t samples = 0;
  /// Smallest K making both bounds hold at every sample (valid when passed).
  double K = 0.0;
  double min_margin = 0.0;
  double max_margin = 0.0;
  bool passed = false;
  /// First sample violating the bounds (the sonic location for q = 0).
  std::optional<double> failure_q;
  std::string message;
};

/// Samples [q_lo, q_hi] at `samples` equispaced points (at least 1000).
EllipticityCertificate certify_condition2(const DensityModel& model, double q_lo, double q_hi,
                                          double q_exponent, double k,
                                          std::size_t samples = 10000);

}  // namespace nlh

#include "nlh/detail/quadrature.hpp"
