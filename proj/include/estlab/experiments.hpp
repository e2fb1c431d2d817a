// Copyright 2026 The estlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "estlab/covmodel.hpp"
#include "estlab/csv.hpp"
#include "estlab/error.hpp"
#include "estlab/fisher.hpp"
#include "estlab/matkernel.hpp"
#include "estlab/parallel.hpp"
#include "estlab/partition.hpp"

namespace estlab {

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(count - 1);
    }
    return out;
}

/// 10^lo ... 10^hi, `count` points evenly spaced in the exponent.
inline std::vector<double> logspace(double lo, double hi, std::size_t count) {
    auto exps = linspace(lo, hi, count);
    for (double &e : exps) e = std::pow(10.0, e);
    return exps;
}

inline double relative_difference(double x, double ref) {
    return ref != 0.0 ? std::abs(x - ref) / std::abs(ref) : std::abs(x);
}

inline std::string describe_grid(const std::vector<double> &g) {
    std::string s;
    for (double v : g) s += format_double(v) + ' ';
    return s;
}

// ---------------------------------------------------------------------------
// Strategy comparison in the white and slow-noise limits

struct Table1Cell {
    std::string approach;
    std::string regime;
    std::string formula;
    double table_value;  ///< the limiting formula printed in the comparison table
    double closed_form;
    double numeric;
    bool agree;
};

/// Direct, WVA (A_w² = 1/γ) and OPM (spin model) information for white noise
/// (a + c)·δ_ij and for the solvable model a·δ_ij + c, each computed in
/// closed form and by numeric inversion. WVA and OPM use the realized
/// retained fraction of their designs, which equals γ whenever γN is integral.
inline std::vector<Table1Cell> table1_cells(double a, double c, std::size_t n, double gamma) {
    CovSpec::solvable(a, c, n).validate();
    if (!(a > 0.0) || c < 0.0) throw InvalidSpec("table1 needs a > 0 and c >= 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidGamma("gamma must lie in (0, 1)");
    const double N = static_cast<double>(n);
    const SymMatrix white = build(CovSpec::white(a, c, n));
    const SymMatrix slow = build(CovSpec::solvable(a, c, n));

    PartitionDesign wva = make_design(n, Scheme::PeriodicPostselect, gamma);
    const double gamma_wva = static_cast<double>(wva.count(Channel::First)) / N;
    const double aw_ideal = 1.0 / std::sqrt(gamma_wva);
    wva = wva.with_coefficients(aw_ideal, 0.0);

    PartitionDesign opm = make_design(n, Scheme::ContiguousBlocks, gamma);
    const double gamma_opm = static_cast<double>(opm.count(Channel::First)) / N;
    const SpinModel spin = spin_model(spin_phi_for_gamma(gamma_opm));
    opm = opm.with_coefficients(spin.aw, spin.awp);

    std::vector<Table1Cell> cells;
    auto add = [&](std::string approach, std::string regime, std::string formula, double table, double closed,
                   double numeric) {
        const bool ok = relative_difference(numeric, closed) <= 1e-8;
        cells.push_back({std::move(approach), std::move(regime), std::move(formula), table, closed, numeric, ok});
    };
    add("direct", "uncorrelated", "N/(a+c)", N / (a + c), fi_direct_solvable(a + c, 0.0, n).value,
        fi_direct_numeric(white).value);
    add("wva", "uncorrelated", "N/(a+c)", N / (a + c), fi_wva_solvable(a + c, 0.0, n, gamma_wva, aw_ideal),
        fi_wva_numeric(white, wva).value);
    add("opm", "uncorrelated", "N/(a+c)", N / (a + c),
        fi_opm_solvable(a + c, 0.0, n, gamma_opm, spin.aw, spin.awp).value, fi_partitioned(white, opm).value);
    add("direct", "correlated", "N/(a+Nc)", N / (a + N * c), fi_direct_solvable(a, c, n).value,
        fi_direct_numeric(slow).value);
    add("wva", "correlated", "N/(a+c) [gamma->0]; N/(a+gamma*N*c) at gamma", N / (a + c),
        fi_wva_solvable(a, c, n, gamma_wva, aw_ideal), fi_wva_numeric(slow, wva).value);
    add("opm", "correlated", "N/a", N / a, fi_opm_solvable(a, c, n, gamma_opm, spin.aw, spin.awp).value,
        fi_partitioned(slow, opm).value);
    return cells;
}

inline Table table1(double a, double c, std::size_t n, double gamma) {
    Table t;
    t.headers = {"approach", "regime", "formula", "table_value", "closed_form", "numeric", "rel_diff", "agree"};
    for (const auto &cell : table1_cells(a, c, n, gamma)) {
        t.add_row({cell.approach, cell.regime, cell.formula, cell.table_value, cell.closed_form,
                   cell.numeric, relative_difference(cell.numeric, cell.closed_form), cell.agree});
    }
    t.config = "table1;a=" + format_double(a) + ";c=" + format_double(c) + ";n=" + std::to_string(n) +
               ";gamma=" + format_double(gamma);
    return t;
}

// ---------------------------------------------------------------------------
// Two-outcome figures

inline std::vector<double> default_fig2_x() { return logspace(-1.0, 1.0, 21); }
inline std::vector<double> default_fig2_r() { return linspace(-0.999, 0.999, 41); }

/// Minimum variance (inverse information) of the two-outcome estimator in
/// units of √(var1·var2), over an (x, r) grid with var2 = 1.
inline Table fig2_surface(const std::vector<double> &x_grid, const std::vector<double> &r_grid) {
    Table t;
    t.headers = {"x", "r", "inverse_fisher"};
    for (double x : x_grid) {
        if (!(x > 0.0)) throw InvalidSpec("x must be > 0");
        for (double r : r_grid) {
            if (!(std::abs(r) < 1.0)) throw InvalidSpec("fig2 needs |r| < 1");
            const auto s = TwoOutcomeSpec::from_xr(x, r);
            t.add_row({x, r, 1.0 / fi_two_outcome(s) / std::sqrt(s.var1 * s.var2)});
        }
    }
    t.config = "fig2;x=" + describe_grid(x_grid) + ";r=" + describe_grid(r_grid);
    return t;
}

struct CurveFamily {
    std::string figure;
    double x;
    double r;
};

/// (x, r) sets for the three variance-versus-α figures: r = 1/2 with varying
/// asymmetry, r = 1 with varying asymmetry, and x = 1 with varying r.
inline std::vector<CurveFamily> default_fig345_families() {
    std::vector<CurveFamily> out;
    for (double x : {0.25, 0.5, 1.0, 2.0, 4.0}) out.push_back({"fig3", x, 0.5});
    for (double x : {0.25, 0.5, 1.0, 2.0, 4.0}) out.push_back({"fig4", x, 1.0});
    for (double r : {-1.0, -0.5, 0.0, 0.5, 1.0}) out.push_back({"fig5", 1.0, r});
    return out;
}

inline std::vector<double> default_alpha_grid() { return linspace(-1.0, 2.0, 61); }

/// Variance of α·s1 + (1−α)·s2 along `alpha_grid` for every family, with the
/// optimal weight and minimum variance repeated on each row. When every α is
/// optimal (var1 = var2 = cov) α* is reported as 1/2.
inline Table fig345_curves(const std::vector<CurveFamily> &families, const std::vector<double> &alpha_grid) {
    Table t;
    t.headers = {"figure", "x", "r", "alpha", "variance", "alpha_star", "min_variance"};
    std::string config = "fig345;";
    for (const auto &f : families) {
        const auto s = TwoOutcomeSpec::from_xr(f.x, f.r);
        double alpha_star = 0.5;
        try {
            alpha_star = optimal_alpha(s);
        } catch (const DegenerateDenominator &) {
        }
        const double vmin = min_two_outcome_variance(s);
        for (double alpha : alpha_grid) {
            if (!std::isfinite(alpha)) throw InvalidSpec("alpha grid must be finite");
            t.add_row({f.figure, f.x, f.r, alpha, two_outcome_variance(s, alpha), alpha_star, vmin});
        }
        config += f.figure + ":" + format_double(f.x) + "," + format_double(f.r) + " ";
    }
    t.config = config + ";alpha=" + describe_grid(alpha_grid);
    return t;
}

// ---------------------------------------------------------------------------
// Block decomposition versus φ

inline std::vector<double> default_phi_grid() { return linspace(0.01, std::numbers::pi - 0.01, 100); }

/// I1, I2, I3 and their sum for the spin model on the solvable covariance,
/// in units of the uncorrelated information N/a.
inline Table fig6_decomposition(std::size_t n, double c_over_a, const std::vector<double> &phi_grid, double a = 1.0) {
    const double c = c_over_a * a;
    const double unit = static_cast<double>(n) / a;
    Table t;
    t.headers = {"phi", "gamma", "aw", "awp", "i1", "i2", "i3", "sum"};
    for (double phi : phi_grid) {
        const SpinModel sm = spin_model(phi);
        const FisherReport r = fi_opm_solvable(a, c, n, sm.gamma, sm.aw, sm.awp);
        const FisherTerms &tm = *r.terms;
        t.add_row({phi, sm.gamma, sm.aw, sm.awp, tm.i1 / unit, tm.i2 / unit, tm.i3 / unit, tm.sum() / unit});
    }
    t.config = "fig6;n=" + std::to_string(n) + ";c_over_a=" + format_double(c_over_a) + ";a=" + format_double(a) +
               ";phi=" + describe_grid(phi_grid);
    return t;
}

// ---------------------------------------------------------------------------
// Exponential-correlation sweep

struct Fig7Config {
    std::size_t n = 1000;
    double a = 1.0;
    double c = 0.05;
    double gamma = 0.005;
    std::vector<double> eta_grid = logspace(-2.0, 6.0, 40);
    Scheme scheme = Scheme::PeriodicPostselect;
    std::size_t reps = 32;  ///< retention patterns averaged for BernoulliPostselect
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    std::string describe() const {
        std::string s = "fig7;n=" + std::to_string(n) + ";a=" + format_double(a) + ";c=" + format_double(c) +
                        ";gamma=" + format_double(gamma) + ";scheme=" + to_string(scheme);
        if (scheme == Scheme::BernoulliPostselect) s += ";reps=" + std::to_string(reps);
        return s + ";eta=" + describe_grid(eta_grid);
    }
};

struct Fig7Row {
    double eta;
    double fi_direct, fi_wva, fi_bgsub;
    /// Inverse variances of the corresponding equal-weight estimators.
    double ew_direct, ew_wva, ew_bgsub;
    double retained;  ///< mean retained count of the WVA designs
};

/// Information of direct, WVA (A_w² = 1/γ, First channel only) and
/// alternating-sign background subtraction versus η, by numeric inversion of
/// the exponential covariance.
inline std::vector<Fig7Row> fig7_rows(const Fig7Config &cfg) {
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw InvalidGamma("gamma must lie in (0, 1)");
    if (cfg.scheme != Scheme::PeriodicPostselect && cfg.scheme != Scheme::BernoulliPostselect) {
        throw ValidationError("fig7 WVA scheme must be periodic or bernoulli");
    }
    for (double eta : cfg.eta_grid) CovSpec::exponential(cfg.a, cfg.c, eta, cfg.n).validate();
    const double aw = 1.0 / std::sqrt(cfg.gamma);
    std::vector<PartitionDesign> wva;
    const std::size_t reps = cfg.scheme == Scheme::BernoulliPostselect ? std::max<std::size_t>(cfg.reps, 1) : 1;
    for (std::size_t r = 0; r < reps; ++r) {
        wva.push_back(make_design(cfg.n, cfg.scheme, cfg.gamma, cfg.seed, r).with_coefficients(aw, 0.0));
    }
    const PartitionDesign alt = make_design(cfg.n, Scheme::AlternatingSign, 0.5);
    const Vector g = alt.mu_prime();
    const Vector u = ones(cfg.n);
    const double N = static_cast<double>(cfg.n);

    std::vector<Fig7Row> rows(cfg.eta_grid.size());
    parallel_for(rows.size(), cfg.threads, [&](std::size_t k) {
        const double eta = cfg.eta_grid[k];
        const SymMatrix c = build(CovSpec::exponential(cfg.a, cfg.c, eta, cfg.n));
        const SpdFactor f(c);
        Fig7Row row{};
        row.eta = eta;
        row.fi_direct = f.quadratic_form(u, u);
        row.fi_bgsub = f.quadratic_form(g, g);
        row.ew_direct = N * N / c.sum();
        row.ew_bgsub = N * N / g.dot(c.dense() * g);
        double fi = 0.0, ew = 0.0, kept = 0.0;
        for (const auto &d : wva) {
            kept += static_cast<double>(d.count(Channel::First));
            if (d.count(Channel::First) == 0) continue;  // contributes zero information
            const FisherReport rep = fi_wva_numeric(c, d);
            fi += rep.value;
            ew += 1.0 / *rep.equal_weight_variance;
        }
        const double R = static_cast<double>(wva.size());
        row.fi_wva = fi / R;
        row.ew_wva = ew / R;
        row.retained = kept / R;
        rows[k] = row;
    });
    return rows;
}

inline Table fig7_sweep(const Fig7Config &cfg) {
    Table t;
    t.headers = {"eta", "fi_direct", "fi_wva", "fi_bgsub", "ew_direct", "ew_wva", "ew_bgsub", "retained"};
    for (const auto &r : fig7_rows(cfg)) {
        t.add_row({r.eta, r.fi_direct, r.fi_wva, r.fi_bgsub, r.ew_direct, r.ew_wva, r.ew_bgsub, r.retained});
    }
    t.config = cfg.describe();
    t.seed = cfg.seed;
    return t;
}

// ---------------------------------------------------------------------------

struct DeltaI {
    double exact;   ///< N/a − N/(a + c)
    double approx;  ///< 1/(a + a/N), the value at c = a/N
};

inline DeltaI delta_i(double a, double c, std::size_t n) {
    if (!(a > 0.0)) throw InvalidSpec("a must be > 0");
    if (c < 0.0) throw InvalidSpec("c must be >= 0");
    if (n < 1) throw InvalidSpec("n must be >= 1");
    const double N = static_cast<double>(n);
    return {N / a - N / (a + c), 1.0 / (a + a / N)};
}

inline Table delta_i_table(double a, double c, std::size_t n) {
    const DeltaI d = delta_i(a, c, n);
    Table t;
    t.headers = {"a", "c", "n", "delta_i", "approx_at_c_eq_a_over_n"};
    t.add_row({a, c, static_cast<unsigned long>(n), d.exact, d.approx});
    t.config = "delta-i;a=" + format_double(a) + ";c=" + format_double(c) + ";n=" + std::to_string(n);
    return t;
}

} // namespace estlab
