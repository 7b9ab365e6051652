#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pasldpc/errors.hpp"
#include "pasldpc/lifting.hpp"
#include "pasldpc/optimizer.hpp"
#include "pasldpc/paschain.hpp"
#include "pasldpc/protograph.hpp"
#include "pasldpc/rates.hpp"
#include "pasldpc/sim.hpp"
#include "pasldpc/surrogate.hpp"

namespace {

using json = nlohmann::json;
using namespace pasldpc;

constexpr int kSchemaVersion = 1;

double parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return std::stod(text);
    const double num = std::stod(text.substr(0, slash));
    const double den = std::stod(text.substr(slash + 1));
    if (den == 0.0) throw Error(ErrorKind::invalid_config, "zero denominator in rate");
    return num / den;
}

// "start:stop:step" or a single value.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        grid.push_back(std::stod(text));
        return grid;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw Error(ErrorKind::invalid_config, "grid needs start:stop:step");
    const double start = std::stod(text.substr(0, c1));
    const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(text.substr(c2 + 1));
    if (step <= 0.0) throw Error(ErrorKind::invalid_config, "grid step must be positive");
    for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
    return grid;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

BaseMatrix load_matrix_arg(const std::string& arg) {
    if (arg == "arob") return robust_base_matrix();
    return load_base_matrix(arg);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw Error(ErrorKind::io_failure, "cannot open " + out_path);
    out << text;
}

// Recover per-column bit levels for a matrix loaded from a bare alist.
void attach_levels(SparseParityMatrix& h, const BaseMatrix& base) {
    if (!h.level_of_column.empty()) return;
    if (h.cols % base.cols != 0) {
        throw Error(ErrorKind::invalid_config,
                    "code blocklength is not a multiple of the base matrix width");
    }
    const int per_col = h.cols / base.cols;
    h.level_of_column.resize(h.cols);
    for (int j = 0; j < h.cols; ++j) {
        h.level_of_column[j] = base.level_of_column[j / per_col];
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Shaped coded-modulation design and simulation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");

    std::string c_text = "13/16";
    int m = 4;
    std::string out_path;
    uint64_t seed = 1;
    int workers = 1;
    app.add_option("--c", c_text, "code rate as a fraction, e.g. 13/16")->capture_default_str();
    app.add_option("--m", m, "bits per symbol")->capture_default_str();
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--seed", seed, "master seed")->envname("PASLDPC_SEED");
    app.add_option("--workers", workers, "worker threads")->envname("PASLDPC_WORKERS");

    // rates
    auto* cmd_rates = app.add_subcommand("rates", "operating curve and SNR/rate gaps as CSV");
    std::string rgrid_text = "0.7:2.7:0.1";
    cmd_rates->add_option("--rgrid", rgrid_text, "R grid start:stop:step")->capture_default_str();

    // surrogate
    auto* cmd_surrogate = app.add_subcommand("surrogate", "fit per-level surrogate channels");
    double sur_r = 2.1;
    std::optional<double> sur_snr_db;
    cmd_surrogate->add_option("--R", sur_r, "spectral efficiency")->required();
    cmd_surrogate->add_option("--snr-db", sur_snr_db, "SNR in dB (default: required BMD SNR)");

    // threshold
    auto* cmd_threshold = app.add_subcommand("threshold", "asymptotic decoding threshold");
    std::string th_matrix = "arob";
    double th_r = 2.1;
    cmd_threshold->add_option("--matrix", th_matrix, "base matrix file or 'arob'")
        ->capture_default_str();
    cmd_threshold->add_option("--R", th_r, "spectral efficiency")->required();

    // optimize
    auto* cmd_optimize = app.add_subcommand("optimize", "integer differential evolution search");
    std::string opt_rate_text = "13/16", opt_pset_text = "0.7,1.1,2.1,2.7", opt_log;
    int opt_d = 4, opt_generations = 200, opt_np = 30;
    double opt_f = 0.8, opt_cr = 0.88;
    std::optional<double> opt_single_rate;
    cmd_optimize->add_option("--rate", opt_rate_text, "code rate fraction")->capture_default_str();
    cmd_optimize->add_option("--D", opt_d, "degrees of freedom per bit level")->capture_default_str();
    cmd_optimize->add_option("--pset", opt_pset_text, "operating set, comma separated")
        ->capture_default_str();
    cmd_optimize->add_option("--generations", opt_generations)->capture_default_str();
    cmd_optimize->add_option("--np", opt_np, "population size")->capture_default_str();
    cmd_optimize->add_option("--F", opt_f, "mutation scale")->capture_default_str();
    cmd_optimize->add_option("--cr", opt_cr, "crossover rate")->capture_default_str();
    cmd_optimize->add_option("--single-rate", opt_single_rate,
                             "optimize the threshold at one rate instead of min-max");
    cmd_optimize->add_option("--log", opt_log, "per-generation best-fitness CSV");

    // lift
    auto* cmd_lift = app.add_subcommand("lift", "expand a base matrix to a parity-check matrix");
    std::string lift_in = "arob", lift_pgc;
    int lift_f = 3, lift_q = 338;
    cmd_lift->add_option("--in", lift_in, "base matrix file or 'arob'")->capture_default_str();
    cmd_lift->add_option("--f", lift_f, "stage-1 factor (parallel edge resolution)")
        ->capture_default_str();
    cmd_lift->add_option("--Q", lift_q, "stage-2 circulant size")->capture_default_str();
    cmd_lift->add_option("--pgc", lift_pgc, "also write the binary lineage format here");

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo FER over the AWGN channel");
    std::string sim_code, sim_base = "arob", sim_snr_text, sim_r_text;
    SimConfig sim_cfg;
    cmd_sim->add_option("--code", sim_code, "parity-check matrix (.alist or .pgc)")->required();
    cmd_sim->add_option("--base", sim_base, "base matrix for bit-level recovery")
        ->capture_default_str();
    cmd_sim->add_option("--R", sim_r_text, "spectral efficiencies, comma separated")->required();
    cmd_sim->add_option("--snr", sim_snr_text, "SNR sweep start:stop:step in dB")->required();
    cmd_sim->add_option("--target-fer", sim_cfg.target_fer)->capture_default_str();
    cmd_sim->add_option("--max-frames", sim_cfg.max_frames)->capture_default_str();
    cmd_sim->add_option("--min-errors", sim_cfg.min_errors)->capture_default_str();
    cmd_sim->add_option("--iters", sim_cfg.bp_iterations, "BP iterations")->capture_default_str();

    // gap
    auto* cmd_gap = app.add_subcommand("gap", "SNR gap to capacity at a target FER");
    std::string gap_results;
    double gap_target = 1e-3;
    cmd_gap->add_option("--results", gap_results, "simulate CSV output")->required();
    cmd_gap->add_option("--target-fer", gap_target)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad usage is an invalid configuration
    }
    const double code_rate = parse_rational(c_text);

    if (*cmd_rates) {
        std::ostringstream csv;
        csv << "R,snr_capacity_db,snr_shaped_db,snr_uniform_db,gap_shaped_db,"
               "gap_uniform_db,rate_gap_shaped,rate_gap_uniform\n";
        for (const CurveRow& row : operating_curve_rows(code_rate, m, parse_grid(rgrid_text))) {
            char buf[320];
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                          row.se, row.snr_capacity_db, row.snr_shaped_db, row.snr_uniform_db,
                          row.gap_shaped_db, row.gap_uniform_db, row.rate_gap_shaped,
                          row.rate_gap_uniform);
            csv << buf;
        }
        emit(csv.str(), out_path);
    } else if (*cmd_surrogate) {
        ThresholdAnalyzer analyzer({code_rate, m});
        const double snr_db = sur_snr_db ? *sur_snr_db : analyzer.required_snr_db(sur_r);
        const SurrogateSet set = analyzer.surrogates(sur_r, snr_db);
        json doc{{"schema_version", kSchemaVersion},
                 {"R", sur_r},
                 {"snr_db", snr_db},
                 {"sigmas", set.sigmas},
                 {"ordering", ordering_signature(set)}};
        emit(doc.dump(2) + "\n", out_path);
    } else if (*cmd_threshold) {
        ThresholdAnalyzer analyzer({code_rate, m});
        const BaseMatrix a = load_matrix_arg(th_matrix);
        const double th_db = analyzer.threshold_db(a, th_r);
        const double cap_db = linear_to_db(std::pow(2.0, 2.0 * th_r) - 1.0);
        json doc{{"schema_version", kSchemaVersion},
                 {"R", th_r},
                 {"threshold_db", th_db},
                 {"gap_db", th_db - cap_db},
                 {"required_snr_db", analyzer.required_snr_db(th_r)}};
        emit(doc.dump(2) + "\n", out_path);
    } else if (*cmd_optimize) {
        DeConfig cfg;
        cfg.population = opt_np;
        cfg.scale_f = opt_f;
        cfg.crossover_cr = opt_cr;
        cfg.generations = opt_generations;
        cfg.seed = seed;
        cfg.workers = workers;
        cfg.levels_d = opt_d;
        cfg.cols = opt_d * m;
        const double rate = parse_rational(opt_rate_text);
        cfg.rows = static_cast<int>(std::lround(cfg.cols * (1.0 - rate)));
        if (opt_single_rate) {
            cfg.robust = false;
            cfg.single_rate = *opt_single_rate;
        } else {
            cfg.operating_set = parse_list(opt_pset_text);
        }
        ThresholdAnalyzer analyzer({rate, m});
        DeOptimizer optimizer(cfg, analyzer);
        std::ostringstream log_csv;
        log_csv << "generation,best_fitness_db\n";
        const Candidate best = optimizer.run(nullptr, [&](const GenerationLog& g) {
            log_csv << g.generation << "," << g.best_fitness << "\n";
            std::cerr << "generation " << g.generation << " best " << g.best_fitness
                      << " dB\n";
        });
        std::ostringstream matrix_text;
        write_base_matrix(best.matrix, matrix_text);
        emit(matrix_text.str(), out_path);
        if (!opt_log.empty()) emit(log_csv.str(), opt_log);
    } else if (*cmd_lift) {
        const BaseMatrix base = load_matrix_arg(lift_in);
        const BaseMatrix binary = expand_parallel(base, lift_f);
        SparseParityMatrix h = lift_circulant(binary, lift_q, seed);
        h.origin.base_id = lift_in;
        h.origin.stage1_factor = lift_f;
        if (out_path.empty()) throw Error(ErrorKind::invalid_config, "lift needs --out");
        write_alist(h, out_path);
        if (!lift_pgc.empty()) write_pgc(h, lift_pgc);
        std::cerr << "wrote " << h.rows << "x" << h.cols << " (girth "
                  << girth(h, 8) << ")\n";
    } else if (*cmd_sim) {
        SparseParityMatrix h;
        if (sim_code.size() > 4 && sim_code.substr(sim_code.size() - 4) == ".pgc") {
            h = read_pgc(sim_code);
        } else {
            h = read_alist(sim_code);
        }
        attach_levels(h, load_matrix_arg(sim_base));
        sim_cfg.code_path = sim_code;
        sim_cfg.code_rate = code_rate;
        sim_cfg.m = m;
        sim_cfg.master_seed = seed;
        sim_cfg.workers = workers;
        sim_cfg.rates = parse_list(sim_r_text);
        const std::vector<double> sweep = parse_grid(sim_snr_text);
        sim_cfg.snr_start_db = sweep.front();
        sim_cfg.snr_stop_db = sweep.back();
        sim_cfg.snr_step_db = sweep.size() > 1 ? sweep[1] - sweep[0] : 1.0;
        emit(sim_results_csv(run_fer(h, sim_cfg)), out_path);
    } else if (*cmd_gap) {
        std::ifstream in(gap_results);
        if (!in) throw Error(ErrorKind::io_failure, "cannot open " + gap_results);
        std::stringstream buffer;
        buffer << in.rdbuf();
        std::ostringstream csv;
        csv << "R,gap_db\n";
        for (const auto& [r, gap] : gap_at_target(parse_sim_results_csv(buffer.str()), gap_target)) {
            char buf[80];
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", r, gap);
            csv << buf;
        }
        emit(csv.str(), out_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::numeric_failure:
            case ErrorKind::degenerate_channel:
            case ErrorKind::diverged_ensemble:
            case ErrorKind::encoder_construction_failure:
                return 3;
            default:
                return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
