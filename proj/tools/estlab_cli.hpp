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

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <system_error>
#include <unistd.h>
#include <vector>

#include "CLI11.hpp"
#include "estlab/estlab.hpp"

namespace estlab::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kValidation = 3, kIo = 4, kNumeric = 5 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { Fisher, Simulate, Figure, Table1, DeltaI };

struct RunConfig {
    Command command = Command::Table1;
    std::string figure;  ///< fig2 | fig345 | fig6 | fig7
    CovKind model = CovKind::Solvable;
    double a = 1.0;
    double c = 0.05;
    std::size_t n = 1000;
    double eta = 1.0;
    double gamma = 0.005;
    std::optional<double> phi;
    double d = 1.0;
    std::optional<Scheme> scheme;
    EstimatorKind estimator = EstimatorKind::EqualWeight;
    std::string weak_value = "spin";  ///< spin | ideal
    WvaNormalization wva_norm = WvaNormalization::Unbiased;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    std::size_t reps = 32;
    std::size_t threads = 1;
    std::string output = "-";
    std::string dump;  ///< optional per-trial estimate file for simulate
    bool help = false;
    std::string help_text;

    CovSpec cov_spec() const { return {model, a, c, eta, n}; }
};

namespace detail {

inline CovKind parse_model(const std::string &s) {
    if (s == "solvable") return CovKind::Solvable;
    if (s == "exponential") return CovKind::Exponential;
    if (s == "white") return CovKind::White;
    throw UsageError("--model: unknown model '" + s + "' (expected solvable | exponential | white)");
}

inline void validate(const RunConfig &cfg) {
    if (cfg.n < 1) throw ValidationError("--n must be >= 1");
    if (cfg.threads > 1024) throw ValidationError("--threads must be <= 1024");
    switch (cfg.command) {
    case Command::Fisher:
    case Command::Simulate:
        cfg.cov_spec().validate();
        if (cfg.phi && !(*cfg.phi > 0.0 && *cfg.phi < std::numbers::pi)) {
            throw OutOfDomain("--phi must lie in (0, pi)");
        }
        if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw InvalidGamma("--gamma must lie in (0, 1)");
        if (cfg.command == Command::Simulate && cfg.trials < 2) throw ValidationError("--trials must be >= 2");
        break;
    case Command::Table1:
        CovSpec::solvable(cfg.a, cfg.c, cfg.n).validate();
        if (!(cfg.a > 0.0) || cfg.c < 0.0) throw InvalidSpec("table1 needs --a > 0 and --c >= 0");
        if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw InvalidGamma("--gamma must lie in (0, 1)");
        break;
    case Command::DeltaI:
        if (!(cfg.a > 0.0) || cfg.c < 0.0) throw InvalidSpec("delta-i needs --a > 0 and --c >= 0");
        break;
    case Command::Figure:
        if (cfg.figure == "fig6") {
            if (!(cfg.a > 0.0)) throw InvalidSpec("--a must be > 0");
            CovSpec::solvable(cfg.a, cfg.c, cfg.n).validate();
        } else if (cfg.figure == "fig7") {
            CovSpec::exponential(cfg.a, cfg.c, 0.0, cfg.n).validate();
            if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw InvalidGamma("--gamma must lie in (0, 1)");
            if (cfg.scheme && *cfg.scheme != Scheme::PeriodicPostselect &&
                *cfg.scheme != Scheme::BernoulliPostselect) {
                throw ValidationError("--scheme for fig7 must be periodic or bernoulli");
            }
        }
        break;
    }
}

/// Splices a flat key=value file named by `--config` into the argument list,
/// right after the subcommand. Keys already given on the command line win.
inline std::vector<std::string> expand_config(int argc, const char *const *argv) {
    static const std::set<std::string> commands{"fisher", "simulate", "figure", "table1", "delta-i"};
    std::vector<std::string> args(argv, argv + argc);
    std::optional<std::string> path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            --i;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            --i;
        }
    }
    if (!path) return args;

    std::ifstream in(*path);
    if (!in) throw IoError("cannot read config file " + *path);
    auto trim = [](std::string t) {
        const auto b = t.find_first_not_of(" \t\r");
        const auto e = t.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    std::set<std::string> given;
    for (const auto &a : args) {
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos
                                                                                            : a.find('=') - 2));
    }
    std::vector<std::string> extra;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(*path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        if (key.empty()) throw UsageError(*path + ":" + std::to_string(lineno) + ": empty key");
        if (given.count(key) != 0) continue;
        extra.push_back("--" + key);
        extra.push_back(value);
    }
    auto cmd = std::find_if(args.begin() + 1, args.end(), [](const std::string &a) { return commands.count(a) != 0; });
    if (cmd == args.end()) throw UsageError("--config needs a subcommand");
    args.insert(cmd + 1, extra.begin(), extra.end());
    return args;
}

} // namespace detail

/// Parses argv into a validated RunConfig. Throws UsageError for malformed
/// command lines and ValidationError when values violate preconditions.
inline RunConfig parse_args(int argc, const char *const *argv) {
    const std::vector<std::string> args = detail::expand_config(argc, argv);
    std::vector<const char *> expanded;
    for (const auto &a : args) expanded.push_back(a.c_str());
    RunConfig cfg;
    CLI::App app{"estlab: precision of direct, weak-value and partitioned estimation under correlated "
                 "Gaussian noise"};
    std::string config_path;
    app.add_option("--config", config_path, "Flat key=value file using the long flag names; flags override it");
    app.require_subcommand(1);

    std::string model = "solvable", scheme, estimator = "equal", wva_norm = "unbiased";

    auto add_model = [&](CLI::App *sub) {
        sub->add_option("--model", model, "Covariance model: solvable | exponential | white")
            ->capture_default_str();
        sub->add_option("--a", cfg.a, "White-noise variance a (units of d^2)")->capture_default_str();
        sub->add_option("--c", cfg.c, "Correlated-noise variance c (units of d^2) [default from the fig7 experiment]")
            ->capture_default_str();
        sub->add_option("--n", cfg.n, "Number of measurements N [default from the fig7 experiment]")
            ->capture_default_str();
        sub->add_option("--eta", cfg.eta, "Correlation time in measurement spacings (exponential model)")
            ->capture_default_str();
    };
    auto add_selection = [&](CLI::App *sub) {
        sub->add_option("--gamma", cfg.gamma,
                        "Post-selection probability (dimensionless) [default from the fig7 experiment]")
            ->capture_default_str();
        sub->add_option("--phi", cfg.phi, "Spin-model overlap angle in radians, in (0, pi); overrides --gamma");
        sub->add_option("--weak-value", cfg.weak_value,
                        "Weak-value convention: spin (A_w = -cot(phi/2)) | ideal (A_w^2 = 1/gamma)")
            ->capture_default_str()
            ->check(CLI::IsMember({"spin", "ideal"}));
    };
    auto add_output = [&](CLI::App *sub) {
        sub->add_option("-o,--output", cfg.output, "Output CSV path ('-' for stdout)")->capture_default_str();
        sub->add_option("--threads", cfg.threads, "Worker thread cap (0 = hardware concurrency)")
            ->capture_default_str();
        sub->add_option("--seed", cfg.seed, "Seed for all randomness (falls back to $ESTLAB_SEED)")
            ->envname("ESTLAB_SEED")
            ->capture_default_str();
    };

    auto *fisher = app.add_subcommand("fisher", "Fisher information of every strategy for one covariance model");
    add_model(fisher);
    add_selection(fisher);
    add_output(fisher);

    auto *simulate = app.add_subcommand("simulate", "Monte Carlo trials of one estimator");
    add_model(simulate);
    add_selection(simulate);
    add_output(simulate);
    simulate->add_option("--scheme", scheme, "Partition scheme: direct | bernoulli | periodic | alternating | blocks");
    simulate->add_option("--estimator", estimator, "Estimator: equal | ml | wva | bgsub | wva-corrected")
        ->capture_default_str();
    simulate->add_option("--wva-norm", wva_norm, "WVA normalization: unbiased (1/(A_w m)) | literal (A_w/N)")
        ->capture_default_str()
        ->check(CLI::IsMember({"unbiased", "literal"}));
    simulate->add_option("--trials", cfg.trials, "Number of trials T")->capture_default_str();
    simulate->add_option("--d", cfg.d, "True parameter value d (units of d)")->capture_default_str();
    simulate->add_option("--dump", cfg.dump, "Also write every per-trial estimate to this CSV");

    auto *figure = app.add_subcommand("figure", "Regenerate a figure's data as CSV");
    figure->add_option("name", cfg.figure, "fig2 | fig345 | fig6 | fig7")
        ->required()
        ->check(CLI::IsMember({"fig2", "fig345", "fig6", "fig7"}));
    add_model(figure);
    add_output(figure);
    figure->add_option("--gamma", cfg.gamma, "fig7: post-selection probability [default 0.005]")
        ->capture_default_str();
    figure->add_option("--scheme", scheme, "fig7: WVA retention scheme, periodic | bernoulli [default periodic]");
    figure->add_option("--reps", cfg.reps, "fig7: retention patterns averaged with --scheme bernoulli")
        ->capture_default_str();
    double c_over_a = 0.5;
    figure->add_option("--c-over-a", c_over_a, "fig6: ratio c/a [default 0.5, fig6 experiment]")
        ->capture_default_str();

    auto *table = app.add_subcommand("table1", "Direct / WVA / OPM information in the white and slow-noise limits");
    table->add_option("--a", cfg.a, "White-noise variance a (units of d^2)")->capture_default_str();
    table->add_option("--c", cfg.c, "Correlated-noise variance c (units of d^2)")->capture_default_str();
    table->add_option("--n", cfg.n, "Number of measurements N")->capture_default_str();
    table->add_option("--gamma", cfg.gamma, "Post-selection probability (dimensionless)")->capture_default_str();
    add_output(table);

    auto *dlt = app.add_subcommand("delta-i", "Information gained by keeping all partitions: N/a - N/(a+c)");
    dlt->add_option("--a", cfg.a, "White-noise variance a (units of d^2)")->capture_default_str();
    dlt->add_option("--c", cfg.c, "Correlated-noise variance c (units of d^2)")->capture_default_str();
    dlt->add_option("--n", cfg.n, "Number of measurements N")->capture_default_str();
    add_output(dlt);

    try {
        app.parse(static_cast<int>(expanded.size()), expanded.data());
    } catch (const CLI::CallForHelp &) {
        cfg.help = true;
        cfg.help_text = app.help();
        return cfg;
    } catch (const CLI::CallForAllHelp &) {
        cfg.help = true;
        cfg.help_text = app.help("", CLI::AppFormatMode::All);
        return cfg;
    } catch (const CLI::ParseError &e) {
        throw UsageError(e.what());
    }

    if (fisher->parsed()) cfg.command = Command::Fisher;
    if (simulate->parsed()) cfg.command = Command::Simulate;
    if (figure->parsed()) cfg.command = Command::Figure;
    if (table->parsed()) cfg.command = Command::Table1;
    if (dlt->parsed()) cfg.command = Command::DeltaI;

    cfg.model = detail::parse_model(model);
    try {
        if (!scheme.empty()) cfg.scheme = parse_scheme(scheme);
        cfg.estimator = parse_estimator(estimator);
    } catch (const ValidationError &e) {
        throw UsageError(e.what());
    }
    cfg.wva_norm = wva_norm == "literal" ? WvaNormalization::Literal : WvaNormalization::Unbiased;
    if (cfg.phi) cfg.gamma = spin_model(*cfg.phi).gamma;

    if (cfg.command == Command::Figure && cfg.figure == "fig6") {
        // The decomposition figure has its own defaults (N = 100, c/a = 0.5).
        if (figure->count("--n") == 0) cfg.n = 100;
        if (figure->count("--c") == 0) cfg.c = c_over_a * cfg.a;
    }
    detail::validate(cfg);
    return cfg;
}

namespace detail {

/// Writes `content` next to `path` and renames it into place, so a failed run
/// never leaves a partial file.
inline void write_atomic(const std::string &path, const std::string &content) {
    if (path == "-" || path.empty()) {
        std::cout << content << std::flush;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into " + path + ": " + ec.message());
    }
}

inline SpinModel spin_for(const RunConfig &cfg) {
    return spin_model(cfg.phi ? *cfg.phi : spin_phi_for_gamma(cfg.gamma));
}

/// Coefficients (first, second channel) for post-selection style designs.
inline std::pair<double, double> weak_values(const RunConfig &cfg, const PartitionDesign &d) {
    if (cfg.weak_value == "ideal") return {1.0 / std::sqrt(d.gamma), 0.0};
    const SpinModel sm = spin_for(cfg);
    return {sm.aw, sm.awp};
}

inline void add_report(Table &t, const std::string &strategy, const std::string &convention, const FisherReport &r) {
    auto opt = [](std::optional<double> v) { return v ? format_double(*v) : std::string(); };
    std::optional<double> i1, i2, i3;
    if (r.terms) {
        i1 = r.terms->i1;
        i2 = r.terms->i2;
        i3 = r.terms->i3;
    }
    t.add_row({strategy, convention, to_string(r.method), r.value, opt(i1), opt(i2), opt(i3),
               opt(r.equal_weight_variance)});
}

inline Table fisher_table(const RunConfig &cfg) {
    const CovSpec spec = cfg.cov_spec();
    const SymMatrix c = build(spec);
    const std::size_t n = cfg.n;
    const SpinModel sm = spin_for(cfg);
    const double gamma = sm.gamma;

    Table t;
    t.headers = {"strategy", "convention", "method", "value", "i1", "i2", "i3", "equal_weight_variance"};
    add_report(t, "direct", "", fi_direct_numeric(c));
    add_report(t, "direct", "", fi_eigen(spectrum_from_matrix(c), n));
    if (spec.kind == CovKind::Solvable) add_report(t, "direct", "", fi_direct_solvable(spec.a, spec.c, n));

    PartitionDesign periodic = make_design(n, Scheme::PeriodicPostselect, gamma);
    const double g_wva = static_cast<double>(periodic.count(Channel::First)) / static_cast<double>(n);
    const double aw_ideal = 1.0 / std::sqrt(g_wva);
    add_report(t, "wva", "ideal", fi_wva_numeric(c, periodic.with_coefficients(aw_ideal, 0.0)));
    add_report(t, "wva", "spin", fi_wva_numeric(c, periodic.with_coefficients(sm.aw, 0.0)));
    if (spec.kind == CovKind::Solvable) {
        FisherReport r;
        r.method = FisherMethod::ClosedForm;
        r.value = fi_wva_solvable(spec.a, spec.c, n, g_wva, aw_ideal);
        add_report(t, "wva", "ideal", r);
        r.value = fi_wva_solvable(spec.a, spec.c, n, g_wva, sm.aw);
        add_report(t, "wva", "spin", r);
    }

    const PartitionDesign blocks = make_design(n, Scheme::ContiguousBlocks, gamma).with_coefficients(sm.aw, sm.awp);
    add_report(t, "opm", "spin", fi_partitioned(c, blocks));
    if (spec.kind == CovKind::Solvable) {
        const double g_opm = static_cast<double>(blocks.count(Channel::First)) / static_cast<double>(n);
        add_report(t, "opm", "spin", fi_opm_solvable(spec.a, spec.c, n, g_opm, sm.aw, sm.awp));
    }
    if (n >= 2) {
        add_report(t, "bgsub", "alternating", fi_partitioned(c, make_design(n, Scheme::AlternatingSign, 0.5)));
    }
    t.config = "fisher;" + spec.describe() + ";gamma=" + format_double(gamma) + ";phi=" + format_double(sm.phi);
    return t;
}

inline Scheme default_scheme(EstimatorKind k) {
    switch (k) {
    case EstimatorKind::EqualWeight: return Scheme::Direct;
    case EstimatorKind::BackgroundSubtraction: return Scheme::AlternatingSign;
    case EstimatorKind::MaxLikelihood: return Scheme::ContiguousBlocks;
    case EstimatorKind::WeakValue:
    case EstimatorKind::WeakValueCorrected: return Scheme::PeriodicPostselect;
    }
    return Scheme::Direct;
}

inline Table simulate_table(const RunConfig &cfg, std::string *dump_csv) {
    const CovSpec spec = cfg.cov_spec();
    const Scheme scheme = cfg.scheme.value_or(default_scheme(cfg.estimator));
    PartitionDesign design = make_design(cfg.n, scheme, cfg.gamma, cfg.seed);
    if (design.is_postselect()) {
        const auto [first, second] = weak_values(cfg, design);
        design = design.with_coefficients(first, second);
    }
    TrialOptions opts;
    opts.threads = cfg.threads;
    opts.wva_norm = cfg.wva_norm;
    const TrialEnsemble ens = run_trials(spec, design, cfg.estimator, cfg.d, cfg.trials, cfg.seed, opts);

    const SymMatrix c = build(spec);
    const bool wva_only =
        cfg.estimator == EstimatorKind::WeakValue && design.count(Channel::First) > 0;
    const double info = wva_only ? fi_wva_numeric(c, design).value : fi_partitioned(c, design.mu_prime()).value;

    Table t;
    t.headers = {"estimator", "scheme", "trials", "d_true", "mean", "variance", "standard_error", "crb",
                 "config_digest"};
    t.add_row({to_string(cfg.estimator), to_string(scheme), static_cast<unsigned long>(ens.trials), cfg.d,
               ens.empirical_mean, ens.empirical_variance, ens.standard_error(), 1.0 / info, ens.digest()});
    t.config = ens.config;
    t.seed = cfg.seed;
    if (dump_csv != nullptr) {
        Table d;
        d.headers = {"trial", "estimate"};
        for (std::size_t i = 0; i < ens.estimates.size(); ++i) {
            d.add_row({static_cast<unsigned long>(i), ens.estimates[i]});
        }
        d.config = ens.config;
        d.seed = cfg.seed;
        *dump_csv = d.to_csv();
    }
    return t;
}

inline Table figure_table(const RunConfig &cfg) {
    if (cfg.figure == "fig2") return fig2_surface(default_fig2_x(), default_fig2_r());
    if (cfg.figure == "fig345") return fig345_curves(default_fig345_families(), default_alpha_grid());
    if (cfg.figure == "fig6") return fig6_decomposition(cfg.n, cfg.c / cfg.a, default_phi_grid(), cfg.a);
    Fig7Config f;
    f.n = cfg.n;
    f.a = cfg.a;
    f.c = cfg.c;
    f.gamma = cfg.gamma;
    f.scheme = cfg.scheme.value_or(Scheme::PeriodicPostselect);
    f.reps = cfg.reps;
    f.seed = cfg.seed;
    f.threads = cfg.threads;
    return fig7_sweep(f);
}

} // namespace detail

/// Executes a parsed configuration and returns the process exit code.
inline int run(const RunConfig &cfg, std::ostream &err = std::cerr) {
    if (cfg.help) {
        std::cout << cfg.help_text;
        return kOk;
    }
    try {
        Table t;
        std::string dump;
        switch (cfg.command) {
        case Command::Fisher: t = detail::fisher_table(cfg); break;
        case Command::Simulate: t = detail::simulate_table(cfg, cfg.dump.empty() ? nullptr : &dump); break;
        case Command::Figure: t = detail::figure_table(cfg); break;
        case Command::Table1: t = table1(cfg.a, cfg.c, cfg.n, cfg.gamma); break;
        case Command::DeltaI: t = delta_i_table(cfg.a, cfg.c, cfg.n); break;
        }
        if (t.seed == 0) t.seed = cfg.seed;
        err << t.metadata_line() << "  [" << t.config.substr(0, 160) << "]\n";
        detail::write_atomic(cfg.output, t.to_csv());
        if (!cfg.dump.empty()) detail::write_atomic(cfg.dump, dump);
        return kOk;
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return e.validation() ? kValidation : kNumeric;
    }
}

/// parse_args + run with exit-code mapping; the body of main().
inline int main(int argc, const char *const *argv, std::ostream &err = std::cerr) {
    RunConfig cfg;
    try {
        cfg = parse_args(argc, argv);
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
        return kUsage;
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return e.validation() ? kValidation : kNumeric;
    }
    return run(cfg, err);
}

} // namespace estlab::cli
