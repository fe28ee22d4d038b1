#include "nlh/density.hpp"

#include "nlh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nlh {

DensityModel DensityModel::constant() {
  DensityModel m;
  m.kind_ = Kind::Constant;
  m.q_max_ = std::numeric_limits<double>::infinity();
  return m;
}

DensityModel DensityModel::polytropic(double gamma) {
  if (!(gamma > 1.0) || !std::isfinite(gamma))
    throw InvalidArgument("polytropic density requires gamma > 1, got " + std::to_string(gamma));
  DensityModel m;
  m.kind_ = Kind::Polytropic;
  m.gamma_ = gamma;
  m.q_max_ = 2.0 / (gamma - 1.0);
  return m;
}

DensityModel DensityModel::minimal_surface() {
  DensityModel m;
  m.kind_ = Kind::MinimalSurface;
  m.q_max_ = std::numeric_limits<double>::infinity();
  return m;
}

DensityModel DensityModel::tabulated(std::vector<double> q, std::vector<double> rho) {
  if (q.size() < 2 || q.size() != rho.size())
    throw InvalidArgument("density table needs at least two (Q, rho) pairs of equal length");
  if (q.front() != 0.0) throw InvalidArgument("density table must start at Q = 0");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(rho[i] > 0.0)) throw InvalidArgument("density table values must be positive");
    if (i > 0 && !(q[i] > q[i - 1])) throw InvalidArgument("density table Q must increase strictly");
  }
  DensityModel m;
  m.kind_ = Kind::Tabulated;
  m.q_max_ = q.back();
  const std::size_t n = q.size();
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (rho[i + 1] - rho[i]) / (q[i + 1] - q[i]);
  std::vector<double> slope(n);
  slope[0] = delta[0];
  slope[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    slope[i] = (delta[i - 1] * delta[i] <= 0.0) ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
  // Fritsch-Carlson limiter keeps each piece monotone.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (delta[i] == 0.0) {
      slope[i] = slope[i + 1] = 0.0;
      continue;
    }
    const double a = slope[i] / delta[i], b = slope[i + 1] / delta[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      slope[i] = t * a * delta[i];
      slope[i + 1] = t * b * delta[i];
    }
  }
  m.tq_ = std::move(q);
  m.trho_ = std::move(rho);
  m.tslope_ = std::move(slope);
  return m;
}

std::string DensityModel::name() const {
  switch (kind_) {
    case Kind::Constant: return "constant";
    case Kind::Polytropic: return "polytropic";
    case Kind::MinimalSurface: return "minimal-surface";
    case Kind::Tabulated: return "tabulated";
  }
  return "unknown";
}

std::optional<double> DensityModel::q_crit() const {
  if (kind_ == Kind::Polytropic) return 2.0 / (gamma_ + 1.0);
  return std::nullopt;
}

bool DensityModel::in_domain(double q) const noexcept {
  if (!(q >= 0.0)) return false;
  if (kind_ == Kind::Polytropic) return q < q_max_;
  return q <= q_max_;
}

void DensityModel::check_domain(double q) const {
  if (in_domain(q)) return;
  std::ostringstream ss;
  ss << name() << " density evaluated at Q = " << q << " outside its domain [0, Q_max = " << q_max_
     << (kind_ == Kind::Polytropic ? ")" : "]");
  throw DomainError(ss.str(), q, q_max_);
}

double DensityModel::table_eval(double q, bool derivative) const {
  auto it = std::upper_bound(tq_.begin(), tq_.end(), q);
  std::size_t i = (it == tq_.begin()) ? 0 : static_cast<std::size_t>(it - tq_.begin()) - 1;
  if (i + 1 >= tq_.size()) i = tq_.size() - 2;
  const double L = tq_[i + 1] - tq_[i];
  const double t = (q - tq_[i]) / L;
  const double y0 = trho_[i], y1 = trho_[i + 1], m0 = tslope_[i] * L, m1 = tslope_[i + 1] * L;
  if (!derivative) {
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
  }
  const double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1;
  const double d01 = -6 * t * t + 6 * t, d11 = 3 * t * t - 2 * t;
  return (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / L;
}

double DensityModel::table_integral(double q) const {
  double total = 0.0;
  std::size_t i = 0;
  for (; i + 1 < tq_.size() && tq_[i + 1] <= q; ++i) {
    const double L = tq_[i + 1] - tq_[i];
    total += L * (trho_[i] + trho_[i + 1]) / 2.0 + L * L * (tslope_[i] - tslope_[i + 1]) / 12.0;
  }
  if (i + 1 < tq_.size() && q > tq_[i])
    total += adaptive_simpson([this](double s) { return table_eval(s, false); }, tq_[i], q, 1e-12);
  return total;
}

double DensityModel::rho(double q) const {
  check_domain(q);
  switch (kind_) {
    case Kind::Constant: return 1.0;
    case Kind::Polytropic: return std::pow(1.0 - 0.5 * (gamma_ - 1.0) * q, 1.0 / (gamma_ - 1.0));
    case Kind::MinimalSurface: return 1.0 / std::sqrt(1.0 + q);
    case Kind::Tabulated: return table_eval(q, false);
  }
  return 1.0;
}

double DensityModel::drho(double q) const {
  check_domain(q);
  switch (kind_) {
    case Kind::Constant: return 0.0;
    case Kind::Polytropic:
      return -0.5 * std::pow(1.0 - 0.5 * (gamma_ - 1.0) * q, (2.0 - gamma_) / (gamma_ - 1.0));
    case Kind::MinimalSurface: return -0.5 * std::pow(1.0 + q, -1.5);
    case Kind::Tabulated: return table_eval(q, true);
  }
  return 0.0;
}

double DensityModel::ellipticity_margin(double q) const {
  check_domain(q);
  switch (kind_) {
    case Kind::Constant: return 1.0;
    case Kind::Polytropic: {
      const double base = 1.0 - 0.5 * (gamma_ - 1.0) * q;
      return std::pow(base, (2.0 - gamma_) / (gamma_ - 1.0)) * (1.0 - 0.5 * (gamma_ + 1.0) * q);
    }
    case Kind::MinimalSurface: return std::pow(1.0 + q, -1.5);
    case Kind::Tabulated: return rho(q) + 2.0 * q * drho(q);
  }
  return 1.0;
}

double DensityModel::stored_energy_integrand(double q) const {
  check_domain(q);
  switch (kind_) {
    case Kind::Constant: return q;
    case Kind::Polytropic:
      return (2.0 / gamma_) *
             (1.0 - std::pow(1.0 - 0.5 * (gamma_ - 1.0) * q, gamma_ / (gamma_ - 1.0)));
    case Kind::MinimalSurface: return 2.0 * (std::sqrt(1.0 + q) - 1.0);
    case Kind::Tabulated: return table_integral(q);
  }
  return q;
}

EllipticityCertificate certify_condition2(const DensityModel& model, double q_lo, double q_hi,
                                          double q_exponent, double k, std::size_t samples) {
  if (!(q_exponent >= 0.0) || !(k >= 0.0))
    throw InvalidArgument("condition (q, k) must be nonnegative");
  if (!(q_lo >= 0.0) || !(q_hi > q_lo) || !std::isfinite(q_hi))
    throw InvalidArgument("certification interval must be a bounded [lo, hi] with 0 <= lo < hi");
  samples = std::max<std::size_t>(samples, 1000);

  EllipticityCertificate cert;
  cert.q_lo = q_lo;
  cert.q_hi = q_hi;
  cert.k = k;
  cert.q_exponent = q_exponent;
  cert.samples = samples;
  cert.min_margin = std::numeric_limits<double>::infinity();
  cert.max_margin = -std::numeric_limits<double>::infinity();
  cert.K = 0.0;
  cert.passed = true;

  for (std::size_t i = 0; i < samples; ++i) {
    const double q = q_lo + (q_hi - q_lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    if (!model.in_domain(q)) {
      cert.passed = false;
      cert.failure_q = q;
      cert.message = "Q = " + std::to_string(q) + " leaves the density domain (Q_max = " +
                     std::to_string(model.q_max()) + ")";
      break;
    }
    const double m = model.ellipticity_margin(q);
    cert.min_margin = std::min(cert.min_margin, m);
    cert.max_margin = std::max(cert.max_margin, m);
    const double weight = std::pow(q + k, q_exponent);
    const double ratio = m / weight;
    if (!(m > 0.0) || !(ratio > 0.0) || !std::isfinite(ratio)) {
      cert.passed = false;
      cert.failure_q = q;
      cert.message = "rho + 2 Q rho' = " + std::to_string(m) + " at Q = " + std::to_string(q) +
                     (m <= 0.0 ? " (loss of ellipticity: sonic transition)" : " (bound degenerate)");
      break;
    }
    cert.K = std::max({cert.K, ratio, 1.0 / ratio});
  }
  if (!cert.passed) cert.K = std::numeric_limits<double>::infinity();
  return cert;
}

}  // namespace nlh
