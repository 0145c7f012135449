// Command-line front end: hypothesis tests on CSV data, critical-value
// simulation, Monte Carlo experiments and long-run variance estimation.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sncoint/sncoint.hpp"

namespace {

using namespace sncoint;

constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

// Options shared by the data-driven subcommands.
struct DataOptions {
    std::string data;
    std::string y;
    std::vector<std::string> x;
    std::string det = "none";
    std::string R1;
    std::string r0;
    double alpha = 0.05;
    std::string kernel = "bartlett";
    std::string bandwidth = "andrews";
    std::string out = "text";

    void add_to(CLI::App& app, bool needs_restriction) {
        app.add_option("data,--data", data, "CSV file with a header row")->required()->check(CLI::ExistingFile);
        app.add_option("--y", y, "dependent variable column (default: first column)");
        app.add_option("--x", x, "regressor column (repeatable; default: all other columns)");
        app.add_option("--det", det, "deterministics: none, const, trend, quad, cubic")
            ->check(CLI::IsMember({"none", "const", "intercept", "trend", "quad", "cubic"}));
        app.add_option("--kernel", kernel, "kernel for long-run variances: bartlett or qs")
            ->check(CLI::IsMember({"bartlett", "qs"}));
        app.add_option("--bandwidth", bandwidth, "'andrews' or a positive number");
        app.add_option("--out", out, "output format: text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
        if (needs_restriction) {
            app.add_option("--R1", R1, "restriction matrix, rows separated by ';' (default: identity)");
            app.add_option("--r0", r0, "restriction values (default: ones)");
            app.add_option("--alpha", alpha, "nominal level")->check(CLI::Range(0.0, 1.0));
        }
    }

    CointegrationSample sample() const { return ingest_csv(data, {y, x}, parse_deterministic(det)); }

    RestrictionSpec restriction(Index m) const {
        const Matrix R = R1.empty() ? Matrix(Matrix::Identity(m, m)) : parse_matrix(R1);
        const Vector r = r0.empty() ? Vector(Vector::Ones(R.rows())) : parse_vector(r0);
        if (R.cols() != m)
            throw InputError("R1 has " + std::to_string(R.cols()) + " columns but there are " + std::to_string(m) +
                             " regressors");
        return {R, r};
    }

    KernelSpec kernel_spec() const {
        const KernelKind kind = parse_kernel(kernel);
        if (bandwidth == "andrews") return KernelSpec::andrews(kind);
        return KernelSpec::fixed(kind, detail::parse_double(bandwidth, "--bandwidth"));
    }
};

std::string fmt_p(const std::optional<double>& p, int precision) {
    if (!p) return precision > 2 ? "" : "-";
    std::ostringstream os;
    os << std::setprecision(precision) << (precision > 2 ? std::defaultfloat : std::fixed) << *p;
    return os.str();
}

void print_outcomes(const std::vector<TestOutcome>& outcomes, const std::string& format) {
    if (format == "json") {
        std::cout << nlohmann::json(outcomes).dump(2) << '\n';
        return;
    }
    if (format == "csv") {
        std::cout << std::setprecision(17) << "method,statistic,critical_value,p_value,reject,alpha\n";
        for (const auto& o : outcomes)
            std::cout << to_string(o.method) << ',' << o.statistic << ',' << o.critical_value << ','
                      << fmt_p(o.p_value, 17) << ',' << (o.reject ? "true" : "false") << ',' << o.alpha << '\n';
        return;
    }
    std::cout << std::left << std::setw(20) << "test" << std::right << std::setw(12) << "statistic"
              << std::setw(12) << "critical" << std::setw(10) << "p-value" << "  decision\n";
    for (const auto& o : outcomes)
        std::cout << std::left << std::setw(20) << to_string(o.method) << std::right << std::fixed
                  << std::setprecision(2) << std::setw(12) << o.statistic << std::setw(12) << o.critical_value
                  << std::setw(10) << fmt_p(o.p_value, 2) << "  " << (o.reject ? "reject" : "not reject") << '\n';
    std::cout << std::defaultfloat;
}

CriticalValueCatalog load_catalog(const std::string& path) {
    if (path.empty()) return published_critical_values();
    std::ifstream in(path);
    if (!in) throw InputError("cannot open critical-value table '" + path + "'");
    CriticalValueCatalog catalog = published_critical_values();
    for (auto& t : read_tables(in)) catalog.add(std::move(t));
    return catalog;
}

std::vector<BootstrapStatistic> parse_statistics(const std::vector<std::string>& names) {
    std::vector<BootstrapStatistic> out;
    for (const auto& n : names) {
        if (n == "sn") out.push_back(BootstrapStatistic::SelfNormalized);
        else if (n == "tau1") out.push_back(BootstrapStatistic::Tau1);
        else if (n == "wald-im") out.push_back(BootstrapStatistic::WaldIm);
        else throw InputError("unknown bootstrap statistic '" + n + "' (expected sn, tau1 or wald-im)");
    }
    return out;
}

struct BootOptions {
    Index B = 1499;
    std::uint64_t seed = 1;
    std::string order = "aic";
    Index burn_in = 100;
    std::size_t workers = 1;
    std::vector<std::string> stats{"sn"};

    void add_to(CLI::App& app) {
        app.add_option("--B", B, "bootstrap replications; (B+1)(1-alpha) must be an integer");
        app.add_option("--seed", seed, "master seed");
        app.add_option("--order", order, "VAR sieve order: aic, bic or a fixed q");
        app.add_option("--burn-in", burn_in, "discarded start-up draws");
        app.add_option("--workers", workers, "worker threads");
        app.add_option("--stat", stats, "bootstrap statistics: sn, tau1, wald-im (repeatable)");
    }

    BootstrapConfig config(double alpha, const KernelSpec& kernel) const {
        BootstrapConfig c;
        c.B = B;
        c.alpha = alpha;
        c.seed = seed;
        c.burn_in = burn_in;
        c.order_rule = parse_order_rule(order);
        c.workers = std::max<std::size_t>(workers, 1);
        c.statistics = parse_statistics(stats);
        c.kernel = kernel;
        c.validate();
        return c;
    }
};

void print_matrix_csv(const Matrix& M) {
    std::cout << std::setprecision(17);
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) std::cout << (j ? "," : "") << M(i, j);
        std::cout << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-normalized and bootstrap inference in cointegrating regressions"};
    app.require_subcommand(1);

    // test
    DataOptions test_opts;
    std::string test_table;
    auto* test_cmd = app.add_subcommand("test", "asymptotic self-normalized test of R1 beta = r0");
    test_opts.add_to(*test_cmd, true);
    test_cmd->add_option("--table", test_table, "critical-value table file (default: built-in values)");
    bool test_wald = false;
    test_cmd->add_flag("--wald", test_wald, "also run the kernel-based Wald tests (IM, FM, D)");

    // boottest
    DataOptions boot_data;
    BootOptions boot_opts;
    auto* boot_cmd = app.add_subcommand("boottest", "VAR sieve bootstrap tests of R1 beta = r0");
    boot_data.add_to(*boot_cmd, true);
    boot_opts.add_to(*boot_cmd);

    // analyze
    DataOptions an_data;
    BootOptions an_boot;
    std::string an_table;
    bool an_no_boot = false;
    auto* an_cmd = app.add_subcommand("analyze", "full report: estimates, self-normalized and Wald tests");
    an_data.add_to(*an_cmd, true);
    an_boot.add_to(*an_cmd);
    an_cmd->add_option("--table", an_table, "critical-value table file");
    an_cmd->add_flag("--no-bootstrap", an_no_boot, "skip the bootstrap tests");

    // critvals
    Index cv_m = 1, cv_s = 1, cv_n = 10000, cv_reps = 10000;
    std::string cv_det = "none", cv_out = "table", cv_file;
    std::uint64_t cv_seed = 1;
    std::size_t cv_workers = 1;
    bool cv_published = false;
    auto* cv_cmd = app.add_subcommand("critvals", "simulate critical values of the self-normalized limit law");
    cv_cmd->add_option("--m", cv_m, "number of integrated regressors")->check(CLI::PositiveNumber);
    cv_cmd->add_option("--s", cv_s, "number of restrictions")->check(CLI::PositiveNumber);
    cv_cmd->add_option("--det", cv_det, "deterministics")
        ->check(CLI::IsMember({"none", "const", "intercept", "trend", "quad", "cubic"}));
    cv_cmd->add_option("--n", cv_n, "grid size (sample size for deterministic panels)");
    cv_cmd->add_option("--reps", cv_reps, "replications");
    cv_cmd->add_option("--seed", cv_seed, "master seed");
    cv_cmd->add_option("--workers", cv_workers, "worker threads");
    cv_cmd->add_option("--out", cv_out, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
    cv_cmd->add_option("--output", cv_file, "write to this file instead of stdout");
    cv_cmd->add_flag("--published", cv_published, "print the built-in tables instead of simulating");

    // localpower
    std::vector<double> lp_grid;
    Index lp_reps = 20000, lp_n = 10000;
    std::uint64_t lp_seed = 1;
    std::size_t lp_workers = 1;
    auto* lp_cmd = app.add_subcommand("localpower", "local asymptotic power curves (m = s = 1), CSV");
    lp_cmd->add_option("--c", lp_grid, "location parameters, comma separated (default: -20..20 step 0.5)")->delimiter(',');
    lp_cmd->add_option("--reps", lp_reps, "replications");
    lp_cmd->add_option("--n", lp_n, "grid size");
    lp_cmd->add_option("--seed", lp_seed, "master seed");
    lp_cmd->add_option("--workers", lp_workers, "worker threads");

    // simulate
    std::string sim_config, sim_out = "csv", sim_manifest;
    std::vector<std::string> sim_set;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo size or size-adjusted power experiment");
    sim_cmd->add_option("--config", sim_config, "key = value experiment file")->check(CLI::ExistingFile);
    sim_cmd->add_option("--set", sim_set, "override a config key, e.g. --set T=250 (repeatable)");
    sim_cmd->add_option("--out", sim_out, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sim_cmd->add_option("--manifest", sim_manifest, "write a JSON run manifest to this file");

    // lrv
    DataOptions lrv_data;
    auto* lrv_cmd = app.add_subcommand("lrv", "long-run covariance of [u-hat OLS, v'] and the conditional variance");
    lrv_data.add_to(*lrv_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*test_cmd) {
            const auto sample = test_opts.sample();
            const auto restr = test_opts.restriction(sample.m());
            std::vector<TestOutcome> outcomes{
                self_normalized_test(sample, restr, load_catalog(test_table), test_opts.alpha)};
            if (test_wald)
                for (auto est : {WaldEstimator::Im, WaldEstimator::Fm, WaldEstimator::D})
                    outcomes.push_back(traditional_wald(est, sample, restr, test_opts.kernel_spec(), test_opts.alpha));
            print_outcomes(outcomes, test_opts.out);
        } else if (*boot_cmd) {
            const auto sample = boot_data.sample();
            const auto restr = boot_data.restriction(sample.m());
            const auto result =
                bootstrap_test(sample, restr, boot_opts.config(boot_data.alpha, boot_data.kernel_spec()));
            if (boot_data.out == "text")
                std::cout << "VAR sieve order q = " << result.order << ", replications " << result.replications
                          << " (discarded " << result.discarded << ")\n";
            print_outcomes(result.outcomes, boot_data.out);
        } else if (*an_cmd) {
            const auto sample = an_data.sample();
            const auto restr = an_data.restriction(sample.m());
            AnalysisOptions options;
            options.alpha = an_data.alpha;
            options.kernel = an_data.kernel_spec();
            options.catalog = load_catalog(an_table);
            options.bootstrap = !an_no_boot;
            options.bootstrap_config = an_boot.config(an_data.alpha, options.kernel);
            AnalysisReport report = run_analysis(sample, restr, options);
            report.provenance.input = an_data.data;
            report.provenance.digest = sha256_file(an_data.data);
            report.provenance.config = {{"det", an_data.det},
                                        {"R1", an_data.R1.empty() ? "identity" : an_data.R1},
                                        {"r0", an_data.r0.empty() ? "ones" : an_data.r0},
                                        {"alpha", std::to_string(an_data.alpha)},
                                        {"kernel", an_data.kernel},
                                        {"bandwidth", an_data.bandwidth},
                                        {"B", an_no_boot ? "0" : std::to_string(an_boot.B)},
                                        {"order", an_boot.order}};
            if (an_data.out == "json") {
                std::cout << nlohmann::json(report).dump(2) << '\n';
            } else {
                std::cout << "T = " << report.T << ", m = " << report.m << ", det = " << report.det << '\n';
                std::cout << std::fixed << std::setprecision(2);
                for (const auto& e : report.estimates) {
                    std::cout << std::left << std::setw(8) << e.estimator << std::right;
                    for (double b : e.beta) std::cout << std::setw(10) << b;
                    std::cout << '\n';
                }
                std::cout << "residual AR(1) persistence " << report.persistence << '\n' << std::defaultfloat;
                print_outcomes(report.tests, an_data.out == "csv" ? "csv" : "text");
                for (const auto& w : report.warnings) std::cout << "note: " << w << '\n';
            }
        } else if (*cv_cmd) {
            std::vector<CriticalValueTable> tables;
            if (cv_published) {
                tables = published_critical_values().tables();
            } else {
                tables.push_back(
                    simulate_critical_values(cv_m, cv_s, parse_deterministic(cv_det), cv_n, cv_reps, cv_seed, cv_workers));
            }
            std::ofstream file;
            if (!cv_file.empty()) {
                file.open(cv_file);
                if (!file) throw InputError("cannot write '" + cv_file + "'");
            }
            std::ostream& os = cv_file.empty() ? std::cout : file;
            if (cv_out == "table") {
                for (const auto& t : tables) write_table(os, t);
            } else if (cv_out == "csv") {
                os << std::setprecision(17) << "m,s,det,n,reps,seed,probability,quantile\n";
                for (const auto& t : tables)
                    for (const auto& [p, q] : t.quantiles)
                        os << t.m << ',' << t.s << ',' << to_string(t.det) << ',' << t.n_grid << ',' << t.reps << ','
                           << t.seed << ',' << p << ',' << q << '\n';
            } else {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& t : tables) {
                    nlohmann::json q = nlohmann::json::object();
                    for (const auto& [p, v] : t.quantiles) {
                        std::ostringstream key;
                        key << p;
                        q[key.str()] = v;
                    }
                    j.push_back({{"m", t.m}, {"s", t.s}, {"det", to_string(t.det)}, {"n", t.n_grid},
                                 {"reps", t.reps}, {"seed", t.seed}, {"quantiles", q}});
                }
                os << j.dump(2) << '\n';
            }
        } else if (*lp_cmd) {
            if (lp_grid.empty())
                for (int i = -40; i <= 40; ++i) lp_grid.push_back(0.5 * i);
            const auto curve = local_power(lp_grid, lp_reps, lp_seed, lp_n, lp_workers);
            std::cout << std::setprecision(17) << "c,power_traditional,power_self_normalized\n";
            for (std::size_t i = 0; i < curve.c_grid.size(); ++i)
                std::cout << curve.c_grid[i] << ',' << curve.power_trad[i] << ',' << curve.power_sn[i] << '\n';
        } else if (*sim_cmd) {
            KeyValueConfig cfg = sim_config.empty() ? KeyValueConfig{} : read_key_value_file(sim_config);
            for (const auto& kv : sim_set) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + kv + "'");
                cfg[detail::trim(kv.substr(0, eq))] = detail::trim(kv.substr(eq + 1));
            }
            const ExperimentSpec spec = experiment_from_config(cfg);
            const ExperimentResult result =
                spec.kind == ExperimentSpec::Kind::Size
                    ? size_experiment(spec.dgp, spec.battery, spec.reps, spec.seed, spec.workers)
                    : size_adjusted_power(spec.dgp, spec.battery, spec.grid, spec.reps, spec.seed, spec.workers);
            if (sim_out == "json") std::cout << nlohmann::json(result).dump(2) << '\n';
            else write_experiment_csv(std::cout, result);
            if (!sim_manifest.empty()) {
                std::ofstream mf(sim_manifest);
                if (!mf) throw InputError("cannot write '" + sim_manifest + "'");
                nlohmann::json manifest{{"config", cfg},
                                        {"seed", spec.seed},
                                        {"reps", spec.reps},
                                        {"workers", spec.workers},
                                        {"elapsed_seconds", result.elapsed_seconds},
                                        {"compiler", __VERSION__},
                                        {"cxx_standard", static_cast<long>(__cplusplus)}};
                mf << manifest.dump(2) << '\n';
            }
        } else if (*lrv_cmd) {
            const auto sample = lrv_data.sample();
            const LrvEstimate est = estimate_lrv(ols_residual_system(sample), lrv_data.kernel_spec());
            if (lrv_data.out == "json") {
                std::vector<std::vector<double>> rows;
                for (Index i = 0; i < est.omega.rows(); ++i) rows.push_back(to_std(est.omega.row(i).transpose()));
                std::cout << nlohmann::json{{"kernel", lrv_data.kernel},
                                            {"bandwidth", est.bandwidth},
                                            {"omega", rows},
                                            {"omega_u_dot_v", est.conditional}}
                                 .dump(2)
                          << '\n';
            } else {
                std::cout << std::setprecision(17) << "# kernel " << lrv_data.kernel << ", bandwidth " << est.bandwidth
                          << ", omega_u.v " << est.conditional << '\n';
                print_matrix_csv(est.omega);
            }
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
