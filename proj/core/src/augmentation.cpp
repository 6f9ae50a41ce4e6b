#include "sensweep/augmentation.hpp"

#include <cmath>

#include "sensweep/errors.hpp"

namespace sensweep {

double rho_lb_from_w(std::int64_t w, std::int64_t n1, std::int64_t n0_obs) {
    if (n1 + n0_obs < 1) throw validation_error("rho_lb_from_w: empty stratum");
    if (w < 0) throw validation_error("rho_lb_from_w: negative w");
    return static_cast<double>(w) / static_cast<double>(n1 + n0_obs + w);
}

std::int64_t w_from_rho_lb(double rho, std::int64_t n1, std::int64_t n0_obs) {
    if (n1 + n0_obs < 1) throw validation_error("w_from_rho_lb: empty stratum");
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw validation_error("w_from_rho_lb: rho must lie in [0, 1)");
    }
    const double observed = static_cast<double>(n1 + n0_obs);
    // Continuous inverse of the bijection; the realized bound is monotone in
    // w, so comparing the two bracketing integers is exact.
    const double w_star = rho * observed / (1.0 - rho);
    if (!(w_star < 9.0e15)) {
        throw guard_error("w_from_rho_lb: augmentation count exceeds the integer range");
    }
    std::int64_t lo = static_cast<std::int64_t>(std::floor(w_star));
    if (lo < 0) lo = 0;
    const std::int64_t hi = lo + 1;
    const double err_lo = std::fabs(rho - rho_lb_from_w(lo, n1, n0_obs));
    const double err_hi = std::fabs(rho - rho_lb_from_w(hi, n1, n0_obs));
    return err_lo <= err_hi ? lo : hi;
}

AugmentedStratum augment(const StratumSummary& stratum, double rho) {
    if (stratum.n1 < 1) {
        throw validation_error("augment: stratum '" + stratum.stratum_id +
                               "' has no treated encounters");
    }
    AugmentedStratum a;
    a.base = stratum;
    a.w = w_from_rho_lb(rho, stratum.n1, stratum.n0_obs);
    a.n_tilde = stratum.n1 + stratum.n0_obs + a.w;
    a.rho_lb_realized = rho_lb_from_w(a.w, stratum.n1, stratum.n0_obs);
    const double treated_mean =
        static_cast<double>(stratum.sum_y1) / static_cast<double>(stratum.n1);
    const double control_denom = static_cast<double>(stratum.n0_obs + a.w);
    const double control_mean =
        control_denom > 0.0 ? static_cast<double>(stratum.sum_y0) / control_denom : 0.0;
    a.tau_hat_aug = treated_mean - control_mean;
    return a;
}

std::vector<AugmentedStratum> augment_all(const StudySummary& summary, double rho,
                                          const RhoMap* overrides) {
    std::vector<AugmentedStratum> out;
    out.reserve(summary.strata.size());
    for (const auto& s : summary.strata) {
        double r = rho;
        if (overrides) {
            auto it = overrides->find(s.stratum_id);
            if (it != overrides->end()) r = it->second;
        }
        out.push_back(augment(s, r));
    }
    return out;
}

}  // namespace sensweep
