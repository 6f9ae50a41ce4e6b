#include "sensweep/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "sensweep/csv.hpp"
#include "sensweep/errors.hpp"
#include "sensweep/log_math.hpp"
#include "sensweep/parallel.hpp"
#include "sensweep/rng.hpp"

namespace sensweep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Residuals below this share of the gross quadratic form are treated as an
// exactly degenerate (zero) variance.
constexpr double kDegenerateTol = 1e-12;

struct MultKey {
    std::int64_t n_tilde;
    std::int64_t n1;
    double gamma;
    bool operator==(const MultKey&) const = default;
};

struct MultKeyHash {
    std::size_t operator()(const MultKey& k) const {
        std::uint64_t g = 0;
        std::memcpy(&g, &k.gamma, sizeof g);
        std::uint64_t h = splitmix64(static_cast<std::uint64_t>(k.n_tilde));
        h = splitmix64(h ^ static_cast<std::uint64_t>(k.n1));
        return static_cast<std::size_t>(splitmix64(h ^ g));
    }
};

// (shrink, inflate) multipliers keyed by stratum shape; strata in a sweep
// share few distinct (n_tilde, n1) shapes, so this removes almost all of the
// hypergeometric work.
using MultCache = std::unordered_map<MultKey, std::pair<double, double>, MultKeyHash>;

std::pair<double, double> multipliers(std::int64_t n_tilde, std::int64_t n1,
                                      double gamma, MultCache& cache) {
    const MultKey key{n_tilde, n1, gamma};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const std::pair<double, double> m{tilt_multiplier(n_tilde, n1, gamma, true),
                                      tilt_multiplier(n_tilde, n1, gamma, false)};
    cache.emplace(key, m);
    return m;
}

struct AugArrays {
    std::vector<std::int64_t> n_tilde;
    std::vector<double> tau_hat;
    std::vector<std::size_t> order;  // indices sorted by tau_hat ascending
};

AugArrays make_aug(const StudySummary& sum, double rho, int threads,
                   const RhoMap* overrides) {
    const std::size_t g = sum.strata.size();
    AugArrays a;
    a.n_tilde.resize(g);
    a.tau_hat.resize(g);
    parallel_for(g, threads, [&](std::size_t i) {
        double r = rho;
        if (overrides) {
            auto it = overrides->find(sum.strata[i].stratum_id);
            if (it != overrides->end()) r = it->second;
        }
        const AugmentedStratum s = augment(sum.strata[i], r);
        a.n_tilde[i] = s.n_tilde;
        a.tau_hat[i] = s.tau_hat_aug;
    });
    a.order.resize(g);
    for (std::size_t i = 0; i < g; ++i) a.order[i] = i;
    std::sort(a.order.begin(), a.order.end(), [&](std::size_t x, std::size_t y) {
        if (a.tau_hat[x] != a.tau_hat[y]) return a.tau_hat[x] < a.tau_hat[y];
        return x < y;
    });
    return a;
}

// Evaluates both one-sided tilted tests for any tau0 at a fixed (rho, Gamma)
// in O(log G) after O(G) setup.  The stratum statistic is piecewise linear in
// tau0 with the multiplier switching at tau_hat_g, so every aggregate is a
// branch-split combination of prefix sums over strata sorted by tau_hat.
class CellEvaluator {
public:
    CellEvaluator(const StudySummary& sum, const AugArrays& aug,
                  std::span<const double> caps, double gamma, MultCache& cache) {
        const std::size_t g = sum.strata.size();
        if (g < 2) {
            throw guard_error("conservative variance requires at least 2 strata");
        }
        g_ = g;
        double n_star = 0.0, sum_sq = 0.0;
        for (std::size_t i = 0; i < g; ++i) {
            const double n = static_cast<double>(aug.n_tilde[i]);
            n_star += n;
            sum_sq += n * n;
        }
        // scaled weights w_g = G * n_g / n_star and their squared sum
        s_w_ = static_cast<double>(g) * static_cast<double>(g) * sum_sq /
               (n_star * n_star);
        tau_sorted_.resize(g);
        alloc(sh_, g);
        alloc(inf_, g);
        for (std::size_t r = 0; r < g; ++r) {
            const std::size_t i = aug.order[r];
            const double n = static_cast<double>(aug.n_tilde[i]);
            const double v = n / n_star;
            const double w = static_cast<double>(g) * v;
            const double h = w * w / s_w_;
            if (h >= 1.0) throw guard_error("leverage 1: variance undefined");
            const double k = w / std::sqrt(1.0 - h);
            const double gamma_g = std::max(1.0, std::min(gamma, caps[i]));
            const auto [m_sh, m_inf] =
                multipliers(aug.n_tilde[i], sum.strata[i].n1, gamma_g, cache);
            const double tau = aug.tau_hat[i];
            tau_sorted_[r] = tau;
            push(sh_, r, v, w, k, m_sh, tau);
            push(inf_, r, v, w, k, m_inf, tau);
        }
    }

    struct OneSided {
        double tau_tilt = 0.0;
        double se2 = 0.0;
        double t_stat = 0.0;
        double p = 1.0;
        bool degenerate = false;
    };
    struct Eval {
        OneSided up, down;
    };

    Eval eval(double tau0) const {
        const std::size_t s = static_cast<std::size_t>(
            std::lower_bound(tau_sorted_.begin(), tau_sorted_.end(), tau0) -
            tau_sorted_.begin());
        Eval e;
        // upper-tailed: shrink where tau_hat >= tau0, inflate below
        e.up = finish(tau0, sh_, inf_, s, +1);
        // lower-tailed: roles swap
        e.down = finish(tau0, inf_, sh_, s, -1);
        return e;
    }

private:
    struct Prefix {
        std::vector<double> vm, vmt;     // tau_tilt: sum v*m, sum v*m*tau
        std::vector<double> q1, q2, q3;  // sum (k*m)^2 {1, tau, tau^2}
        std::vector<double> r1, r2;      // sum w*k*m {1, tau}
    };

    static void alloc(Prefix& p, std::size_t g) {
        for (auto* v : {&p.vm, &p.vmt, &p.q1, &p.q2, &p.q3, &p.r1, &p.r2}) {
            v->assign(g + 1, 0.0);
        }
    }

    static void push(Prefix& p, std::size_t r, double v, double w, double k,
                     double m, double tau) {
        const double km = k * m;
        const double km2 = km * km;
        p.vm[r + 1] = p.vm[r] + v * m;
        p.vmt[r + 1] = p.vmt[r] + v * m * tau;
        p.q1[r + 1] = p.q1[r] + km2;
        p.q2[r + 1] = p.q2[r] + km2 * tau;
        p.q3[r + 1] = p.q3[r] + km2 * tau * tau;
        p.r1[r + 1] = p.r1[r] + w * km;
        p.r2[r + 1] = p.r2[r] + w * km * tau;
    }

    // hi applies to strata with tau_hat >= tau0, lo to the rest
    OneSided finish(double tau0, const Prefix& hi, const Prefix& lo, std::size_t s,
                    int direction) const {
        auto mix = [&](const std::vector<double>& a, const std::vector<double>& b) {
            return (a[g_] - a[s]) + b[s];
        };
        const double sum_vm = mix(hi.vm, lo.vm);
        const double sum_vmt = mix(hi.vmt, lo.vmt);
        const double a1 = mix(hi.q1, lo.q1);
        const double a2 = mix(hi.q2, lo.q2);
        const double a3 = mix(hi.q3, lo.q3);
        const double b1 = mix(hi.r1, lo.r1);
        const double b2 = mix(hi.r2, lo.r2);

        OneSided o;
        o.tau_tilt = sum_vmt - tau0 * sum_vm;
        const double gross = a3 - 2.0 * tau0 * a2 + tau0 * tau0 * a1;
        const double b = b2 - tau0 * b1;
        double resid = gross - b * b / s_w_;
        if (!(resid > kDegenerateTol * gross)) {
            o.degenerate = true;
            o.se2 = 0.0;
        } else {
            o.se2 = resid / (static_cast<double>(g_) * static_cast<double>(g_));
        }
        if (o.degenerate) {
            o.t_stat = o.tau_tilt > 0.0 ? kInf : (o.tau_tilt < 0.0 ? -kInf : 0.0);
        } else {
            o.t_stat = o.tau_tilt / std::sqrt(o.se2);
        }
        o.p = one_sided_pvalue(o.tau_tilt, o.se2, direction);
        return o;
    }

    std::size_t g_ = 0;
    double s_w_ = 0.0;
    std::vector<double> tau_sorted_;
    Prefix sh_, inf_;
};

std::vector<double> resolve_caps(const StudySummary& sum, const CeilingMap* ceilings) {
    std::vector<double> caps(sum.strata.size(), kInf);
    if (ceilings) {
        for (std::size_t i = 0; i < sum.strata.size(); ++i) {
            auto it = ceilings->find(sum.strata[i].stratum_id);
            if (it != ceilings->end()) caps[i] = it->second;
        }
    }
    return caps;
}

void validate_grids(std::span<const double> rho_grid, std::span<const double> gamma_grid) {
    if (rho_grid.empty()) throw validation_error("empty rho grid");
    if (gamma_grid.empty()) throw validation_error("empty gamma grid");
    for (double r : rho_grid) {
        if (!(r >= 0.0 && r < 1.0)) {
            throw validation_error("rho grid value outside [0, 1)");
        }
    }
    for (double g : gamma_grid) {
        if (!(g >= 1.0)) throw validation_error("gamma grid value below 1");
    }
}

const StudySummary& ensure_informative(const StudySummary& summary,
                                       StudySummary& storage) {
    if (summary.informative_only) return summary;
    storage = filter_informative(summary).summary;
    return storage;
}

}  // namespace

double conservative_variance(std::span<const double> lambdas,
                             std::span<const double> n_tildes) {
    const std::size_t g = lambdas.size();
    if (g != n_tildes.size()) {
        throw validation_error("conservative_variance: size mismatch");
    }
    if (g < 2) throw guard_error("conservative variance requires at least 2 strata");
    double n_star = 0.0;
    for (double n : n_tildes) n_star += n;
    if (!(n_star > 0.0)) throw validation_error("conservative_variance: empty strata");
    double s_w = 0.0;
    std::vector<double> w(g);
    for (std::size_t i = 0; i < g; ++i) {
        w[i] = static_cast<double>(g) * n_tildes[i] / n_star;
        s_w += w[i] * w[i];
    }
    double gross = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
        const double h = w[i] * w[i] / s_w;
        if (h >= 1.0) throw guard_error("leverage 1: variance undefined");
        const double y = w[i] * lambdas[i] / std::sqrt(1.0 - h);
        gross += y * y;
        cross += w[i] * y;
    }
    const double resid = gross - cross * cross / s_w;
    if (!(resid > kDegenerateTol * gross)) return 0.0;
    return resid / (static_cast<double>(g) * static_cast<double>(g));
}

double one_sided_pvalue(double tau_tilt, double se2, int direction) {
    if (direction != 1 && direction != -1) {
        throw validation_error("one_sided_pvalue: direction must be +1 or -1");
    }
    if (se2 < 0.0) throw validation_error("one_sided_pvalue: negative variance");
    if (se2 == 0.0) {
        // degenerate convention: 0 when the statistic strictly favors the
        // alternative, 1 otherwise
        return static_cast<double>(direction) * tau_tilt > 0.0 ? 0.0 : 1.0;
    }
    const double t = tau_tilt / std::sqrt(se2);
    return direction == 1 ? 1.0 - normal_cdf(t) : normal_cdf(t);
}

std::vector<SweepCell> grid_sweep(const StudySummary& summary,
                                  std::span<const double> rho_grid,
                                  std::span<const double> gamma_grid, double tau0,
                                  int direction, const CeilingMap* ceilings,
                                  int threads, const RhoMap* rho_overrides) {
    validate_grids(rho_grid, gamma_grid);
    if (direction != 1 && direction != -1) {
        throw validation_error("grid_sweep: direction must be +1 or -1");
    }
    StudySummary storage;
    const StudySummary& sum = ensure_informative(summary, storage);
    const std::vector<double> caps = resolve_caps(sum, ceilings);

    std::vector<SweepCell> cells(rho_grid.size() * gamma_grid.size());
    for (std::size_t ri = 0; ri < rho_grid.size(); ++ri) {
        const AugArrays aug = make_aug(sum, rho_grid[ri], threads, rho_overrides);
        parallel_for(gamma_grid.size(), threads, [&](std::size_t gi) {
            SweepCell& cell = cells[ri * gamma_grid.size() + gi];
            cell.rho_lb = rho_grid[ri];
            cell.gamma = gamma_grid[gi];
            cell.tau0 = tau0;
            try {
                MultCache cache;
                const CellEvaluator ev(sum, aug, caps, gamma_grid[gi], cache);
                const auto e = ev.eval(tau0);
                const auto& dir = direction == 1 ? e.up : e.down;
                cell.tau_tilt = dir.tau_tilt;
                cell.se2 = dir.se2;
                cell.t_stat = dir.t_stat;
                cell.p_upper = e.up.p;
                cell.p_lower = e.down.p;
                cell.se_degenerate = dir.degenerate;
            } catch (const std::exception& ex) {
                cell.ok = false;
                cell.error = ex.what();
                cell.tau_tilt = cell.se2 = cell.t_stat = kNan;
                cell.p_upper = cell.p_lower = kNan;
            }
        });
    }
    return cells;
}

SweepCell estimate_cell(const StudySummary& summary, double rho, double gamma,
                        double tau0, int direction, const CeilingMap* ceilings,
                        const RhoMap* rho_overrides) {
    const double rg[1] = {rho};
    const double gg[1] = {gamma};
    return grid_sweep(summary, rg, gg, tau0, direction, ceilings, 1, rho_overrides)[0];
}

std::vector<ConfSetRow> conf_set_sweep(const StudySummary& summary,
                                       std::span<const double> rho_grid,
                                       std::span<const double> gamma_grid,
                                       std::span<const double> tau_grid, double alpha,
                                       const CeilingMap* ceilings, int threads,
                                       const RhoMap* rho_overrides) {
    validate_grids(rho_grid, gamma_grid);
    if (tau_grid.empty()) throw validation_error("empty tau grid");
    if (!std::is_sorted(tau_grid.begin(), tau_grid.end())) {
        throw validation_error("tau grid must be sorted ascending");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw validation_error("alpha must lie in (0, 1)");
    }
    StudySummary storage;
    const StudySummary& sum = ensure_informative(summary, storage);
    const std::vector<double> caps = resolve_caps(sum, ceilings);
    const double cut = alpha / 2.0;

    std::vector<ConfSetRow> rows(rho_grid.size() * gamma_grid.size());
    for (std::size_t ri = 0; ri < rho_grid.size(); ++ri) {
        const AugArrays aug = make_aug(sum, rho_grid[ri], threads, rho_overrides);
        parallel_for(gamma_grid.size(), threads, [&](std::size_t gi) {
            ConfSetRow& row = rows[ri * gamma_grid.size() + gi];
            row.rho_lb = rho_grid[ri];
            row.gamma = gamma_grid[gi];
            MultCache cache;
            const CellEvaluator ev(sum, aug, caps, gamma_grid[gi], cache);
            std::vector<double> retained;
            for (double tau0 : tau_grid) {
                const auto e = ev.eval(tau0);
                if (e.up.p >= cut && e.down.p >= cut) retained.push_back(tau0);
            }
            if (retained.empty()) {
                row.empty = true;
                row.ci_low = row.ci_high = row.tau_hl = kNan;
                row.contains_zero = false;
            } else {
                row.ci_low = retained.front();
                row.ci_high = retained.back();
                row.tau_hl = retained[(retained.size() - 1) / 2];  // lower median
                row.contains_zero = row.ci_low <= 0.0 && 0.0 <= row.ci_high;
            }
        });
    }
    return rows;
}

std::optional<double> changepoint(std::span<const ConfSetRow> rows, double rho_lb) {
    bool saw_rho = false;
    std::optional<double> best;
    for (const auto& row : rows) {
        if (row.rho_lb != rho_lb) continue;
        saw_rho = true;
        if (row.empty || !row.contains_zero) continue;
        if (!best || row.gamma < *best) best = row.gamma;
    }
    if (!saw_rho) {
        throw validation_error("changepoint: no confidence-set rows at rho_lb = " +
                               csv::format_double(rho_lb));
    }
    return best;
}

void write_sweep_csv(std::span<const SweepCell> cells, const std::filesystem::path& path,
                     const std::string& config_comment) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write file: " + path.string());
    if (!config_comment.empty()) out << "# " << config_comment << "\n";
    out << "rho_lb,gamma,tau0,tau_tilt,se2,t_stat,p_upper,p_lower\n";
    for (const auto& c : cells) {
        out << csv::format_double(c.rho_lb) << ',' << csv::format_double(c.gamma) << ','
            << csv::format_double(c.tau0) << ',' << csv::format_double(c.tau_tilt)
            << ',' << csv::format_double(c.se2) << ',' << csv::format_double(c.t_stat)
            << ',' << csv::format_double(c.p_upper) << ','
            << csv::format_double(c.p_lower) << "\n";
    }
}

void write_confset_csv(std::span<const ConfSetRow> rows,
                       const std::filesystem::path& path,
                       const std::string& config_comment) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write file: " + path.string());
    if (!config_comment.empty()) out << "# " << config_comment << "\n";
    out << "rho_lb,gamma,ci_low,ci_high,tau_hl,contains_zero\n";
    for (const auto& r : rows) {
        out << csv::format_double(r.rho_lb) << ',' << csv::format_double(r.gamma) << ','
            << csv::format_double(r.ci_low) << ',' << csv::format_double(r.ci_high)
            << ',' << csv::format_double(r.tau_hl) << ',' << (r.contains_zero ? 1 : 0)
            << "\n";
    }
}

}  // namespace sensweep
