#pragma once

// Selection-side augmentation.  A posited lower bound rho on the share of
// missing structurally-zero control encounters maps to an integer count w of
// appended controls; the augmented stratum carries the enlarged size and the
// augmented Difference-in-Means.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sensweep/data_model.hpp"

namespace sensweep {

// optional per-stratum selection bounds; entries replace the common scalar
using RhoMap = std::unordered_map<std::string, double>;

struct AugmentedStratum {
    StratumSummary base;
    std::int64_t w = 0;        // appended zero-outcome controls
    std::int64_t n_tilde = 0;  // n1 + n0_obs + w
    double rho_lb_realized = 0.0;  // w / n_tilde
    double tau_hat_aug = 0.0;      // sum_y1/n1 - sum_y0/(n0_obs + w)
};

// w -> w / (n1 + n0_obs + w); strictly increasing in w.
double rho_lb_from_w(std::int64_t w, std::int64_t n1, std::int64_t n0_obs);

// Nearest-integer inverse: argmin_w |rho - w/(n1+n0_obs+w)|, evaluated at the
// two integers bracketing the continuous inverse rho*(n1+n0_obs)/(1-rho).
// Ties break toward the smaller w.
std::int64_t w_from_rho_lb(double rho, std::int64_t n1, std::int64_t n0_obs);

AugmentedStratum augment(const StratumSummary& stratum, double rho);

// Augment every stratum at the common rho, with per-stratum overrides where
// supplied.
std::vector<AugmentedStratum> augment_all(const StudySummary& summary, double rho,
                                          const RhoMap* overrides = nullptr);

}  // namespace sensweep
