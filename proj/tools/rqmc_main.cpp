// Command-line front end: point dumps, net verification, discrepancy,
// estimation and convergence studies. Every artifact-writing run also writes
// a <artifact>.config.json echo sufficient to re-run it exactly.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rqmc/estimate.hpp"
#include "rqmc/io.hpp"
#include "rqmc/rng.hpp"
#include "rqmc/verify.hpp"

using nlohmann::json;

namespace {

struct SamplerFlags {
    std::string sampler = "sobol";
    int base = 2;
    int dim = 2;
    std::string scramble = "none";
    std::string direction_file;
    std::uint64_t korobov_a = 0;
};

void add_sampler_flags(CLI::App* cmd, SamplerFlags& sf, const std::string& default_scramble) {
    sf.scramble = default_scramble;
    const char* env_file = std::getenv("RQMC_SOBOL_FILE");
    if (env_file) sf.direction_file = env_file;
    cmd->add_option("--sampler", sf.sampler,
                    "Point source: sobol, faure, mc, lattice")
        ->default_val(sf.sampler);
    cmd->add_option("-b,--base", sf.base, "Digit base (faure nets)")->default_val(sf.base);
    cmd->add_option("-d,--dim", sf.dim, "Dimension")->default_val(sf.dim);
    cmd->add_option("--scramble", sf.scramble,
                    "Randomization: none, nested_uniform, linear, digital_shift")
        ->default_val(sf.scramble);
    cmd->add_option("--direction-file", sf.direction_file,
                    "Joe-Kuo direction-number table (default: $RQMC_SOBOL_FILE, else builtin)");
    cmd->add_option("--korobov-a", sf.korobov_a, "Korobov multiplier (lattice sampler)");
}

rqmc::SamplerConfig to_sampler_config(const SamplerFlags& sf) {
    rqmc::SamplerConfig cfg;
    if (sf.sampler == "sobol" || sf.sampler == "scrambled-net" || sf.sampler == "net") {
        cfg.kind = rqmc::SamplerKind::scrambled_net;
        cfg.base = 2;
    } else if (sf.sampler == "faure") {
        cfg.kind = rqmc::SamplerKind::scrambled_net;
        cfg.base = sf.base;
        if (cfg.base == 2)
            throw rqmc::config_error("faure sampling here uses a prime base >= dim; pass -b");
    } else if (sf.sampler == "mc" || sf.sampler == "plain-mc") {
        cfg.kind = rqmc::SamplerKind::plain_mc;
    } else if (sf.sampler == "lattice" || sf.sampler == "lattice-cp") {
        cfg.kind = rqmc::SamplerKind::lattice_cp;
    } else {
        throw rqmc::config_error("unknown sampler: " + sf.sampler);
    }
    cfg.dim = sf.dim;
    cfg.scramble = rqmc::scramble_kind_from_string(sf.scramble);
    cfg.direction_file = sf.direction_file;
    cfg.korobov_a = sf.korobov_a;
    return cfg;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& kvs) {
    std::map<std::string, double> out;
    for (const std::string& kv : kvs) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw rqmc::config_error("expected --param name=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq);
        std::string val = kv.substr(eq + 1);
        char* end = nullptr;
        double v = std::strtod(val.c_str(), &end);
        if (end != val.c_str() + val.size() || val.empty())
            throw rqmc::config_error("bad numeric value in --param '" + kv + "'");
        out[key] = v;
    }
    return out;
}

json echo_base(const std::vector<std::string>& cmdline) {
    json j;
    j["command_line"] = cmdline;
    return j;
}

void write_artifact(const std::string& path, const std::string& content, const json& echo) {
    rqmc::write_file_atomic(path, content);
    rqmc::write_file_atomic(rqmc::config_echo_path(path), echo.dump(2) + "\n");
}

rqmc::PointDump read_dump(const std::string& in_path) {
    if (in_path == "-") return rqmc::read_point_dump(std::cin);
    std::ifstream in(in_path);
    if (!in) throw rqmc::io_error("cannot open '" + in_path + "'");
    return rqmc::read_point_dump(in);
}

// Digit data for verification: prefer the exact digit dump, fall back to
// recovering binary digits from base-2 values.
rqmc::DigitalPointSet verification_set(const rqmc::PointDump& dump) {
    if (dump.digits) return *dump.digits;
    if (dump.meta.base != 2)
        throw rqmc::config_error(
            "verification in base " + std::to_string(dump.meta.base) +
            " needs a points-digits dump; float recovery is exact only in base 2");
    int precision = dump.meta.precision > 0 ? dump.meta.precision : rqmc::default_precision(2);
    return rqmc::DigitalPointSet::from_values(2, dump.meta.dim, precision, dump.values, true);
}

int infer_m(std::uint64_t count, int base) {
    int m = 0;
    std::uint64_t v = 1;
    while (v < count) {
        v *= static_cast<std::uint64_t>(base);
        ++m;
    }
    if (v != count)
        throw rqmc::config_error("point count " + std::to_string(count) + " is not a power of " +
                                 std::to_string(base) + "; pass -m explicitly");
    return m;
}

json witness_json(const rqmc::IntervalWitness& w) {
    json j;
    j["k"] = w.k;
    j["c"] = w.c;
    j["observed"] = w.observed;
    j["required"] = w.required;
    return j;
}

// ---- subcommand bodies ----

struct PointsArgs {
    SamplerFlags sf;
    int m = -1;
    std::uint64_t n = 0;
    std::uint64_t start = 0;
    std::uint64_t seed = 1;
    std::uint64_t replicate = 0;
    std::string order = "natural";
    std::string format = "points-text";
    bool rotate = false;
    std::string out;
};

int run_points(const PointsArgs& a, const std::vector<std::string>& cmdline) {
    rqmc::SamplerConfig cfg = to_sampler_config(a.sf);
    std::uint64_t n = a.n;
    if (n == 0) {
        if (a.m < 0) throw rqmc::config_error("pass -m (point count b^m) or -n");
        n = 1;
        for (int i = 0; i < a.m; ++i) n *= static_cast<std::uint64_t>(cfg.base == 2 ? 2 : cfg.base);
    }

    rqmc::DumpMeta meta;
    meta.kind = a.sf.sampler;
    meta.base = cfg.base;
    meta.dim = cfg.dim;
    meta.seed = a.seed;
    meta.replicate = a.replicate;
    meta.index_start = a.start;
    meta.count = n;

    std::ostringstream body;
    bool digits_format = a.format == "points-digits";
    if (a.format != "points-text" && !digits_format)
        throw rqmc::config_error("format must be points-text or points-digits");

    if (cfg.kind == rqmc::SamplerKind::scrambled_net) {
        rqmc::Sampler sampler(cfg);  // builds + validates the matrices
        const rqmc::GeneratorMatrixSet& g = *sampler.matrices();
        meta.precision = g.precision();
        if (!g.provenance().empty()) meta.extra["directions"] = g.provenance();
        meta.extra["scramble"] = a.sf.scramble;
        if (a.order == "gray") meta.extra["order"] = "gray";
        rqmc::IndexOrder order = a.order == "gray" ? rqmc::IndexOrder::gray
                                                   : rqmc::IndexOrder::natural;
        rqmc::DigitalPointSet pts = rqmc::generate_points(g, a.start, n, order);
        if (cfg.scramble != rqmc::ScrambleKind::none) {
            rqmc::ScrambleSpec spec;
            spec.kind = cfg.scramble;
            spec.base = cfg.base;
            spec.dim = cfg.dim;
            spec.depth = g.precision();
            spec.seed = a.seed;
            spec.replicate = a.replicate;
            pts = rqmc::scramble_points(pts, spec);
            meta.precision = pts.precision();
        }
        if (digits_format) {
            rqmc::write_points_digits(body, meta, pts);
        } else {
            std::vector<double> values;
            values.reserve(pts.size() * static_cast<std::size_t>(cfg.dim));
            for (std::size_t p = 0; p < pts.size(); ++p)
                for (int j = 0; j < cfg.dim; ++j) values.push_back(pts.value(p, j));
            rqmc::write_points_text(body, meta, values);
        }
    } else if (cfg.kind == rqmc::SamplerKind::plain_mc) {
        if (digits_format) throw rqmc::config_error("digit dumps exist for digital nets only");
        rqmc::Sampler sampler(cfg);
        std::vector<double> values(n * static_cast<std::size_t>(cfg.dim));
        std::vector<double> x(static_cast<std::size_t>(cfg.dim));
        for (std::uint64_t i = 0; i < n; ++i) {
            sampler.point_at(a.start + i, a.seed, a.replicate, x.data());
            std::copy(x.begin(), x.end(), values.begin() + i * static_cast<std::size_t>(cfg.dim));
        }
        rqmc::write_points_text(body, meta, values);
    } else {
        if (digits_format) throw rqmc::config_error("digit dumps exist for digital nets only");
        if (cfg.korobov_a == 0) throw rqmc::config_error("lattice points need --korobov-a");
        rqmc::LatticeRule rule = rqmc::korobov_rule(n, cfg.korobov_a, cfg.dim);
        std::vector<double> values = rqmc::lattice_points(rule);
        meta.extra["korobov_a"] = std::to_string(cfg.korobov_a);
        if (a.rotate) {
            values = rqmc::cranley_patterson(values,
                                             rqmc::rotation_shift(cfg.dim, a.seed, a.replicate));
            meta.extra["rotated"] = "1";
        }
        rqmc::write_points_text(body, meta, values);
    }

    if (a.out.empty()) {
        std::cout << body.str();
    } else {
        write_artifact(a.out, body.str(), echo_base(cmdline));
    }
    return 0;
}

struct CheckArgs {
    std::string in = "-";
    int t = 0;
    int m = -1;
};

int run_check_net(const CheckArgs& a) {
    rqmc::PointDump dump = read_dump(a.in);
    rqmc::DigitalPointSet pts = verification_set(dump);
    int m = a.m >= 0 ? a.m : infer_m(pts.size(), pts.base());
    rqmc::NetCheckReport rep = rqmc::check_net(pts, a.t, m);
    json j;
    j["pass"] = rep.pass;
    j["t"] = rep.t;
    j["m"] = rep.m;
    j["shapes_checked"] = rep.shapes_checked;
    if (rep.witness) j["witness"] = witness_json(*rep.witness);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_tvalue(const CheckArgs& a) {
    rqmc::PointDump dump = read_dump(a.in);
    rqmc::DigitalPointSet pts = verification_set(dump);
    int m = a.m >= 0 ? a.m : infer_m(pts.size(), pts.base());
    json j;
    j["m"] = m;
    j["t"] = rqmc::exact_t(pts, m);
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct DiscrepancyArgs {
    std::string in = "-";
    std::string mode = "exact";
    int trials = 64;
    std::uint64_t seed = 1;
};

int run_discrepancy(const DiscrepancyArgs& a) {
    rqmc::PointDump dump = read_dump(a.in);
    rqmc::DiscrepancyResult res;
    if (a.mode == "exact") {
        res = rqmc::star_discrepancy_exact(dump.values, dump.meta.dim);
    } else if (a.mode == "lower-bound") {
        res = rqmc::star_discrepancy_lower_bound(dump.values, dump.meta.dim, a.trials, a.seed);
    } else {
        throw rqmc::config_error("mode must be exact or lower-bound");
    }
    json j;
    j["value"] = res.value;
    j["mode"] = a.mode;
    j["witness"] = res.witness;
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct EstimateArgs {
    SamplerFlags sf;
    std::string integrand;
    std::vector<std::string> params;
    std::uint64_t n = 0;
    int replicates = 1;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
};

int run_estimate(const EstimateArgs& a, const std::vector<std::string>& cmdline) {
    rqmc::Sampler sampler(to_sampler_config(a.sf));
    rqmc::Integrand f = rqmc::make_integrand(a.integrand, sampler.dim(), parse_params(a.params));
    json j;
    j["n"] = a.n;
    j["integrand"] = a.integrand;
    if (a.replicates <= 1) {
        j["estimate"] = sampler.estimate(f, a.n, a.seed, 0);
    } else {
        rqmc::ReplicateStats st =
            rqmc::replicate_variance(sampler, f, a.n, a.replicates, a.seed, a.workers);
        j["mean"] = st.mean;
        j["variance"] = st.variance;
        j["std_error"] = std::sqrt(st.variance / a.replicates);
        j["replicates"] = a.replicates;
    }
    if (auto mu = f.mean()) j["mu"] = *mu;
    std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!a.out.empty()) write_artifact(a.out, text, echo_base(cmdline));
    return 0;
}

struct ConvergeArgs {
    SamplerFlags sf;
    std::string integrand;
    std::vector<std::string> params;
    rqmc::StudyConfig study;
    std::string out;
};

int run_converge(const ConvergeArgs& a, const std::vector<std::string>& cmdline) {
    rqmc::Sampler sampler(to_sampler_config(a.sf));
    rqmc::Integrand f = rqmc::make_integrand(a.integrand, sampler.dim(), parse_params(a.params));
    rqmc::ConvergenceReport rep = rqmc::converge_study(sampler, f, a.study);
    std::ostringstream csv;
    rqmc::write_convergence_csv(csv, rep);
    write_artifact(a.out, csv.str(), echo_base(cmdline));

    json j;
    j["rows"] = rep.rows.size();
    j["output"] = a.out;
    try {
        rqmc::SlopeFit fit = rqmc::rmse_slope(rep, a.study.m_min, a.study.m_max);
        j["rmse_slope"] = fit.slope;
        j["rmse_slope_stderr"] = fit.stderr_;
    } catch (const rqmc::config_error&) {
        // not enough geometric rows or no analytic mean; slope omitted
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct SllnArgs {
    SamplerFlags sf;
    std::string integrand;
    std::vector<std::string> params;
    int R = 3;
    std::uint64_t n_max = 1u << 16;
    int seeds = 100;
    std::uint64_t seed = 1;
    int workers = 1;
    double eps = 0.05;
    std::string out;
};

int run_slln(const SllnArgs& a, const std::vector<std::string>& cmdline) {
    rqmc::SllnConfig cfg;
    cfg.sampler = to_sampler_config(a.sf);
    cfg.integrand = a.integrand;
    cfg.params = parse_params(a.params);
    cfg.R = a.R;
    cfg.n_max = a.n_max;
    cfg.seeds = a.seeds;
    cfg.master_seed = a.seed;
    cfg.workers = a.workers;
    rqmc::SllnReport rep = rqmc::slln_study(cfg);

    std::ostringstream csv;
    rqmc::write_slln_csv(csv, rep);
    write_artifact(a.out, csv.str(), echo_base(cmdline));

    std::size_t last = rep.ns.size() - 1;
    int below = 0;
    for (const auto& traj : rep.estimates)
        if (std::abs(traj[last] - *rep.mu) < a.eps) ++below;
    json j;
    j["final_n"] = rep.ns[last];
    j["err_median"] = rep.err_median[last];
    j["err_q90"] = rep.err_q90[last];
    j["err_max"] = rep.err_max[last];
    j["seeds_within_eps"] = below;
    j["seeds"] = a.seeds;
    j["eps"] = a.eps;
    j["output"] = a.out;
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct Figure1Args {
    std::uint64_t seed = 1;
    int m = 9;
    std::string prefix = "figure1";
};

// The three classic panels: plain MC points, raw Sobol' points, and nested
// uniform scrambled Sobol' points, 2^m points in the unit square each.
int run_figure1(const Figure1Args& a, const std::vector<std::string>& cmdline) {
    for (const char* kind : {"mc", "sobol", "scrambled-sobol"}) {
        PointsArgs pa;
        pa.sf.dim = 2;
        pa.sf.sampler = std::string(kind) == "mc" ? "mc" : "sobol";
        pa.sf.scramble = std::string(kind) == "scrambled-sobol" ? "nested_uniform" : "none";
        pa.m = a.m;
        pa.seed = a.seed;
        pa.out = a.prefix + "-" + kind + ".txt";
        run_points(pa, cmdline);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> cmdline(argv, argv + argc);
    CLI::App app{"digital nets, scrambling, and randomized QMC studies"};
    app.require_subcommand(1);

    PointsArgs points_args;
    CLI::App* points = app.add_subcommand("points", "Generate a point dump");
    add_sampler_flags(points, points_args.sf, "none");
    points->add_option("-m", points_args.m, "Dump b^m points");
    points->add_option("-n", points_args.n, "Dump exactly n points (overrides -m)");
    points->add_option("--start", points_args.start, "First point index")->default_val(0);
    points->add_option("--seed", points_args.seed)->default_val(1);
    points->add_option("--replicate", points_args.replicate)->default_val(0);
    points->add_option("--order", points_args.order, "natural or gray")->default_val("natural");
    points->add_option("--format", points_args.format, "points-text or points-digits")
        ->default_val("points-text");
    points->add_flag("--rotate", points_args.rotate, "Cranley-Patterson rotation (lattice)");
    points->add_option("-o,--out", points_args.out, "Output path (default: stdout)");
    points->callback([&]() { run_points(points_args, cmdline); });

    CheckArgs check_args;
    CLI::App* check = app.add_subcommand("check-net", "Verify the (t,m,d)-net property");
    check->add_option("--in", check_args.in, "Point dump ('-' for stdin)")->default_val("-");
    check->add_option("-t", check_args.t, "Claimed t")->default_val(0);
    check->add_option("-m", check_args.m, "Net exponent (default: log_b n)");
    check->callback([&]() { run_check_net(check_args); });

    CheckArgs tvalue_args;
    CLI::App* tvalue = app.add_subcommand("tvalue", "Exact t of a dumped point set");
    tvalue->add_option("--in", tvalue_args.in, "Point dump ('-' for stdin)")->default_val("-");
    tvalue->add_option("-m", tvalue_args.m, "Net exponent (default: log_b n)");
    tvalue->callback([&]() { run_tvalue(tvalue_args); });

    DiscrepancyArgs disc_args;
    CLI::App* disc = app.add_subcommand("discrepancy", "Star discrepancy of a dump");
    disc->add_option("--in", disc_args.in, "Point dump ('-' for stdin)")->default_val("-");
    disc->add_option("--mode", disc_args.mode, "exact or lower-bound")->default_val("exact");
    disc->add_option("--trials", disc_args.trials, "Random corners (lower-bound mode)")
        ->default_val(64);
    disc->add_option("--seed", disc_args.seed)->default_val(1);
    disc->callback([&]() { run_discrepancy(disc_args); });

    EstimateArgs est_args;
    CLI::App* est = app.add_subcommand("estimate", "Estimate an integral");
    add_sampler_flags(est, est_args.sf, "nested_uniform");
    est->add_option("--integrand", est_args.integrand, "Registry id")->required();
    est->add_option("--param", est_args.params, "Integrand parameter name=value");
    est->add_option("-n", est_args.n, "Sample size")->required();
    est->add_option("--replicates", est_args.replicates)->default_val(1);
    est->add_option("--seed", est_args.seed)->default_val(1);
    est->add_option("--workers", est_args.workers)->default_val(1);
    est->add_option("-o,--out", est_args.out, "Also write the JSON result here");
    est->callback([&]() { run_estimate(est_args, cmdline); });

    ConvergeArgs conv_args;
    CLI::App* conv = app.add_subcommand("converge", "Replicated convergence study -> CSV");
    add_sampler_flags(conv, conv_args.sf, "nested_uniform");
    conv->add_option("--integrand", conv_args.integrand, "Registry id")->required();
    conv->add_option("--param", conv_args.params, "Integrand parameter name=value");
    conv->add_option("--m-min", conv_args.study.m_min)->default_val(4);
    conv->add_option("--m-max", conv_args.study.m_max)->default_val(10);
    conv->add_option("-R", conv_args.study.R, "Blocks per exponent")->default_val(1);
    conv->add_option("--replicates", conv_args.study.replicates)->default_val(2000);
    conv->add_option("--p-replicates", conv_args.study.p_replicates)->default_val(500);
    conv->add_option("--seed", conv_args.study.seed)->default_val(1);
    conv->add_option("-p", conv_args.study.p, "Moment order in (1,2)")->default_val(1.5);
    conv->add_option("--eps", conv_args.study.eps, "Tail threshold")->default_val(0.1);
    conv->add_option("--workers", conv_args.study.workers)->default_val(1);
    conv->add_option("-o,--out", conv_args.out, "CSV output path")->required();
    conv->callback([&]() { run_converge(conv_args, cmdline); });

    SllnArgs slln_args;
    CLI::App* slln = app.add_subcommand("slln", "Running-estimate schedule study -> CSV");
    add_sampler_flags(slln, slln_args.sf, "nested_uniform");
    slln->add_option("--integrand", slln_args.integrand, "Registry id")->required();
    slln->add_option("--param", slln_args.params, "Integrand parameter name=value");
    slln->add_option("-R", slln_args.R, "Blocks per exponent")->default_val(3);
    slln->add_option("--n-max", slln_args.n_max)->default_val(1u << 16);
    slln->add_option("--seeds", slln_args.seeds)->default_val(100);
    slln->add_option("--seed", slln_args.seed, "Master seed")->default_val(1);
    slln->add_option("--workers", slln_args.workers)->default_val(1);
    slln->add_option("--eps", slln_args.eps, "Error threshold in the summary")->default_val(0.05);
    slln->add_option("-o,--out", slln_args.out, "CSV output path")->required();
    slln->callback([&]() { run_slln(slln_args, cmdline); });

    Figure1Args fig_args;
    CLI::App* fig = app.add_subcommand("figure1", "MC / Sobol' / scrambled Sobol' dumps (2D)");
    fig->add_option("--seed", fig_args.seed)->default_val(1);
    fig->add_option("-m", fig_args.m, "2^m points per panel")->default_val(9);
    fig->add_option("-o,--out", fig_args.prefix, "Output path prefix")->default_val("figure1");
    fig->callback([&]() { run_figure1(fig_args, cmdline); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const rqmc::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const rqmc::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const rqmc::limit_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const rqmc::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 6;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
