#pragma once

// Worst-case assignment-probability bounds and tilted statistics.
//
// For a stratum of augmented size n_tilde with n1 treated slots, the number
// of assignments sharing overlap j with a fixed assignment is
// C(n1,j)*C(n_tilde-n1, n1-j), which makes the bound denominators
// hypergeometric sums over at most n1+1 terms.  The canonical code path
// rewrites the bound inverses as expectations over that overlap count J:
//
//   (1/|Omega|) / p_upper = E[Gamma^(J - n1)]   (shrinks toward zero)
//   (1/|Omega|) / p_lower = E[Gamma^(n1 - J)]   (inflates away from zero)
//
// so no |Omega|-sized magnitude is ever materialized.  All sums run in
// log space.

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sensweep/augmentation.hpp"

namespace sensweep {

struct TiltSpec {
    double gamma = 1.0;   // uniform odds bound, >= 1
    std::unordered_map<std::string, double> gamma_by_stratum;  // optional per-stratum
    double tau0 = 0.0;    // null value
    int direction = +1;   // +1 upper-tailed (tau > tau0), -1 lower-tailed

    // Per-stratum bound, falling back to the uniform gamma.
    double resolve_gamma(const std::string& stratum_id) const {
        if (!gamma_by_stratum.empty()) {
            auto it = gamma_by_stratum.find(stratum_id);
            if (it != gamma_by_stratum.end()) return it->second;
        }
        return gamma;
    }
};

struct TiltResult {
    std::vector<std::string> stratum_ids;
    std::vector<double> lambda;   // stratum tilted statistics
    std::vector<double> weight;   // n_tilde_g / n_tilde_star
    double tau_tilt = 0.0;
    double n_tilde_star = 0.0;
};

// Smallest overlap with positive probability: max(0, 2*n1 - n_tilde).
std::int64_t overlap_j_min(std::int64_t n_tilde, std::int64_t n1);

// pmf of the overlap count J over j = overlap_j_min .. n1.
std::vector<double> overlap_pmf(std::int64_t n_tilde, std::int64_t n1);

struct ProbBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Worst-case bounds on the conditional probability of a fixed assignment
// over every mechanism satisfying the odds restriction.
ProbBounds prob_bounds(std::int64_t n_tilde, std::int64_t n1, double gamma);

// E[Gamma^(J-n1)] when shrink, E[Gamma^(n1-J)] otherwise; exactly 1 at
// gamma == 1.
double tilt_multiplier(std::int64_t n_tilde, std::int64_t n1, double gamma,
                       bool shrink);

// Centered Difference-in-Means scaled by the bound working against the
// alternative; the boundary d*(tau_hat - tau0) == 0 uses the shrink branch.
double stratum_tilted_stat(const AugmentedStratum& stratum, const TiltSpec& spec);

TiltResult aggregate_tilted_stat(std::span<const AugmentedStratum> strata,
                                 const TiltSpec& spec);

}  // namespace sensweep
