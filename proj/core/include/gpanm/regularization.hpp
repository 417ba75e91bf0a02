// SPDX-License-Identifier: Apache-2.0
//
// Regularization weight for GP-ANM and the probability that the noise stays
// inside the bound used to derive it.
#pragma once

#include <string_view>

namespace gpanm {

enum class ChosenBound { BD1, BD2 };

std::string_view to_string(ChosenBound b) noexcept;

// sqrt(2) sigma Gamma((NP+1)/2) / Gamma(NP/2), the mean Frobenius norm of an
// N x P circular Gaussian noise matrix.
double bd1(int n, int p, double sigma);

// (sqrt N + sqrt P + t) sigma, the high-probability spectral-norm bound.
double bd2(int n, int p, double t, double sigma);

struct TauReport {
  double bd1 = 0.0;
  double bd2 = 0.0;
  double tau = 0.0;
  double tau_simplified = 0.0;  // eta sigma sqrt(4 N P ln N), the C_e = 0 value
  double t_param = 4.0;
  double eta = 1.0;
  ChosenBound chosen_bound = ChosenBound::BD1;
};

// tau = eta (min(bd1, bd2) C_e + sigma sqrt(4 N P ln N)). Requires n >= 2,
// eta >= 1, sigma > 0, ce >= 0, t >= 0.
TauReport tau(int n, int p, double sigma, double ce, double eta = 1.0, double t = 4.0);

// eta sigma sqrt(4 N P ln N).
double tau_simplified(int n, int p, double sigma, double eta = 1.0);

// 1 - 1/N^2 - (1 - 1/N^2) z, clamped to [0, 1], where z = 2 exp(-t^2/2) when
// sqrt N + sqrt P + t <= bd1(N, P, 1) and otherwise the regularized upper
// incomplete gamma Q(NP/2, (sqrt N + sqrt P + t)^2 / 2).
double reconstruction_probability(int n, int p, double t = 4.0);

}  // namespace gpanm
