// SPDX-License-Identifier: Apache-2.0
#include "gpanm/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "gpanm/errors.hpp"

namespace gpanm {

std::string_view to_string(ChosenBound b) noexcept { return b == ChosenBound::BD1 ? "BD1" : "BD2"; }

double bd1(int n, int p, double sigma) {
  require(n >= 1 && p >= 1, ErrorCode::InvalidArgument, "bd1 needs n, p >= 1");
  require(sigma > 0.0, ErrorCode::InvalidArgument, "bd1 needs sigma > 0");
  const double np = static_cast<double>(n) * static_cast<double>(p);
  return std::numbers::sqrt2 * sigma * std::exp(std::lgamma((np + 1.0) / 2.0) - std::lgamma(np / 2.0));
}

double bd2(int n, int p, double t, double sigma) {
  require(n >= 1 && p >= 1, ErrorCode::InvalidArgument, "bd2 needs n, p >= 1");
  require(t >= 0.0, ErrorCode::InvalidArgument, "bd2 needs t >= 0");
  require(sigma > 0.0, ErrorCode::InvalidArgument, "bd2 needs sigma > 0");
  return (std::sqrt(static_cast<double>(n)) + std::sqrt(static_cast<double>(p)) + t) * sigma;
}

double tau_simplified(int n, int p, double sigma, double eta) {
  require(n >= 2 && p >= 1, ErrorCode::InvalidArgument, "tau needs n >= 2 and p >= 1");
  require(sigma > 0.0, ErrorCode::InvalidArgument, "tau needs sigma > 0");
  require(eta >= 1.0, ErrorCode::InvalidArgument, "tau needs eta >= 1");
  return eta * sigma * std::sqrt(4.0 * n * p * std::log(static_cast<double>(n)));
}

TauReport tau(int n, int p, double sigma, double ce, double eta, double t) {
  require(ce >= 0.0, ErrorCode::InvalidArgument, "tau needs ce >= 0");
  TauReport r;
  r.tau_simplified = tau_simplified(n, p, sigma, eta);
  r.bd1 = bd1(n, p, sigma);
  r.bd2 = bd2(n, p, t, sigma);
  r.t_param = t;
  r.eta = eta;
  r.chosen_bound = r.bd1 <= r.bd2 ? ChosenBound::BD1 : ChosenBound::BD2;
  r.tau = eta * std::min(r.bd1, r.bd2) * ce + r.tau_simplified;
  return r;
}

double reconstruction_probability(int n, int p, double t) {
  require(n >= 2 && p >= 1, ErrorCode::InvalidArgument, "reconstruction_probability needs n >= 2");
  require(t >= 0.0, ErrorCode::InvalidArgument, "reconstruction_probability needs t >= 0");
  const double radius = std::sqrt(static_cast<double>(n)) + std::sqrt(static_cast<double>(p)) + t;
  const double np = static_cast<double>(n) * static_cast<double>(p);
  double z = 0.0;
  if (radius <= bd1(n, p, 1.0)) z = 2.0 * std::exp(-t * t / 2.0);
  else z = boost::math::gamma_q(np / 2.0, radius * radius / 2.0);
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
  return std::clamp(1.0 - inv_n2 - (1.0 - inv_n2) * z, 0.0, 1.0);
}

}  // namespace gpanm
