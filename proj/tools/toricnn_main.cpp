// Batch front-end: training, Monte-Carlo sweeps, memory-time runs, scaling
// fits, single decodes, and the appendix analyses. Every run resolves its
// configuration (CLI > config file > defaults), writes its artifacts under
// one output directory, and records a manifest there even on failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "toricnn/analysis.hpp"
#include "toricnn/io.hpp"
#include "toricnn/montecarlo.hpp"
#include "toricnn/training.hpp"

using namespace toricnn;
using nlohmann::json;

namespace {

int default_workers() {
    if (const char* env = std::getenv("TORICNN_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return omp_get_max_threads();
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::vector<double> parse_p_spec(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double lo, hi, step;
        char c1, c2;
        std::istringstream ss(spec);
        if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
            throw std::invalid_argument("bad p range, expected lo:hi:step");
        for (double p = lo; p <= hi + 1e-12; p += step) out.push_back(p);
        return out;
    }
    std::istringstream ss(spec);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    if (out.empty()) throw std::invalid_argument("empty p list");
    return out;
}

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    std::istringstream ss(spec);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stoi(cell));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

// A run directory with its manifest. The manifest is written on both
// success and failure paths.
class RunContext {
public:
    RunContext(const std::string& command, const json& config, const std::string& out_override)
        : command_(command), config_(config) {
        const uint64_t h = fnv1a64(reinterpret_cast<const uint8_t*>(config.dump().data()),
                                   config.dump().size());
        dir_ = out_override.empty()
                   ? (std::filesystem::path("runs") / (command + "_" + hex64(h).substr(0, 8)))
                   : std::filesystem::path(out_override);
        std::filesystem::create_directories(dir_);
        manifest_["command"] = command;
        manifest_["config"] = config;
        manifest_["started_utc"] = utc_now();
        manifest_["artifacts"] = json::array();
        manifest_["checkpoints"] = json::object();
    }

    const std::filesystem::path& dir() const { return dir_; }

    void note_checkpoint(const std::string& path, const Network& net) {
        manifest_["checkpoints"][path] = checkpoint_checksum(net);
    }

    std::string write_artifact(const std::string& name, const std::string& body) {
        const std::string path = (dir_ / name).string();
        write_text_file(path, body);
        manifest_["artifacts"].push_back(path);
        return path;
    }

    void finish_ok() {
        manifest_["status"] = "ok";
        manifest_["finished_utc"] = utc_now();
        write_text_file((dir_ / "manifest.json").string(), manifest_.dump(1));
        std::cout << "artifacts in " << dir_.string() << "\n";
    }

    void finish_error(const std::string& message) {
        manifest_["status"] = "error";
        manifest_["error"] = message;
        manifest_["finished_utc"] = utc_now();
        write_text_file((dir_ / "manifest.json").string(), manifest_.dump(1));
    }

private:
    std::string command_;
    json config_;
    std::filesystem::path dir_;
    json manifest_;
};

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    return json::parse(read_text_file(path));
}

template <typename T>
void cfg_override(const json& j, const char* key, const CLI::Option* opt, T& value) {
    if (opt->count() == 0 && j.contains(key)) value = j.at(key).get<T>();
}

int run_guarded(const std::string& command, const json& config, const std::string& out_dir,
                const std::function<void(RunContext&)>& body) {
    RunContext ctx(command, config, out_dir);
    try {
        body(ctx);
        ctx.finish_ok();
        return 0;
    } catch (const std::invalid_argument& e) {
        ctx.finish_error(e.what());
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        ctx.finish_error(e.what());
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"convolutional decoder for the 3D/4D toric code"};
    app.require_subcommand(1);
    int workers = default_workers();
    app.add_option("--workers", workers, "worker pool size (env TORICNN_WORKERS)");

    // ---- train ----------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "train a decoder network");
    std::string tr_model = "a", tr_config, tr_out;
    int tr_dim = 4, tr_side = 0, tr_channels = 0, tr_epochs = 20, tr_batch = 64;
    double tr_p = -1.0, tr_q = -1.0, tr_eta0 = 1e-3;
    std::string tr_prange;
    long tr_samples = 0;
    uint64_t tr_seed = 12345;
    auto* o_model = train_cmd->add_option("--model", tr_model, "error model: a or b");
    auto* o_dim = train_cmd->add_option("--dim", tr_dim, "lattice dimension (3 or 4)");
    auto* o_side = train_cmd->add_option("--l", tr_side, "training lattice side");
    auto* o_ch = train_cmd->add_option("--channels", tr_channels, "hidden channels");
    auto* o_p = train_cmd->add_option("--p", tr_p, "single training error rate");
    auto* o_pr = train_cmd->add_option("--p-range", tr_prange, "training p range lo:hi");
    auto* o_q = train_cmd->add_option("--q", tr_q, "measurement error rate (model b)");
    auto* o_samples = train_cmd->add_option("--samples", tr_samples, "dataset size");
    auto* o_epochs = train_cmd->add_option("--epochs", tr_epochs, "training epochs");
    auto* o_batch = train_cmd->add_option("--batch", tr_batch, "batch size");
    auto* o_eta = train_cmd->add_option("--eta0", tr_eta0, "initial Adam learning rate");
    auto* o_seed_t = train_cmd->add_option("--seed", tr_seed, "run seed");
    train_cmd->add_option("--config", tr_config, "JSON config file");
    train_cmd->add_option("--out", tr_out, "output directory");

    // ---- sweep ----------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "logical error rate sweep (error model a)");
    std::string sw_net, sw_l = "5,6", sw_p = "0.066:0.074:0.002", sw_config, sw_out;
    int sw_dim = 4;
    long sw_trials = 500;
    uint64_t sw_seed = 12345;
    DecoderConfig sw_dec;
    sweep_cmd->add_option("--net", sw_net, "checkpoint path")->required();
    auto* o_swdim = sweep_cmd->add_option("--dim", sw_dim, "lattice dimension");
    auto* o_swl = sweep_cmd->add_option("--l", sw_l, "comma list of sides");
    auto* o_swp = sweep_cmd->add_option("--p", sw_p, "p values: lo:hi:step or comma list");
    auto* o_swt = sweep_cmd->add_option("--trials", sw_trials, "trials per (L,p) point");
    auto* o_swseed = sweep_cmd->add_option("--seed", sw_seed, "run seed");
    auto* o_swx = sweep_cmd->add_option("--flip-divisor", sw_dec.flip_divisor, "x in m = weight/x");
    sweep_cmd->add_option("--config", sw_config, "JSON config file");
    sweep_cmd->add_option("--out", sw_out, "output directory");

    // ---- memory ---------------------------------------------------------
    auto* mem_cmd = app.add_subcommand("memory", "memory-time estimation (error model b, p = q)");
    std::string mm_net_b, mm_net_a, mm_l = "3,4", mm_config, mm_out;
    double mm_p = 0.01;
    long mm_runs = 50, mm_cap = 10000;
    uint64_t mm_seed = 12345;
    long mm_round_budget = 32;
    mem_cmd->add_option("--net-b", mm_net_b, "noisy-model checkpoint")->required();
    mem_cmd->add_option("--net-a", mm_net_a, "model-(a) checkpoint for assessment")->required();
    auto* o_mml = mem_cmd->add_option("--l", mm_l, "comma list of sides");
    auto* o_mmp = mem_cmd->add_option("--p", mm_p, "physical = measurement error rate");
    auto* o_mmr = mem_cmd->add_option("--runs", mm_runs, "independent runs per side");
    auto* o_mmc = mem_cmd->add_option("--round-cap", mm_cap, "censoring cap in rounds");
    auto* o_mmb = mem_cmd->add_option("--round-budget", mm_round_budget, "NN steps per round");
    auto* o_mmseed = mem_cmd->add_option("--seed", mm_seed, "run seed");
    mem_cmd->add_option("--config", mm_config, "JSON config file");
    mem_cmd->add_option("--out", mm_out, "output directory");

    // ---- fit ------------------------------------------------------------
    auto* fit_cmd = app.add_subcommand("fit", "finite-size scaling fit from a sweep CSV");
    std::string ft_input, ft_out, ft_config;
    fit_cmd->add_option("--input", ft_input, "sweep CSV path")->required();
    fit_cmd->add_option("--config", ft_config, "JSON config file");
    fit_cmd->add_option("--out", ft_out, "output directory");

    // ---- decode-one -----------------------------------------------------
    auto* dec_cmd = app.add_subcommand("decode-one", "sample one error and decode it");
    std::string dc_net, dc_out, dc_config;
    int dc_side = 5;
    double dc_p = 0.05;
    uint64_t dc_seed = 12345;
    bool dc_trace = false;
    dec_cmd->add_option("--net", dc_net, "checkpoint path")->required();
    auto* o_dcl = dec_cmd->add_option("--l", dc_side, "lattice side");
    auto* o_dcp = dec_cmd->add_option("--p", dc_p, "error rate");
    auto* o_dcseed = dec_cmd->add_option("--seed", dc_seed, "run seed");
    dec_cmd->add_flag("--trace", dc_trace, "write a JSON-lines step trace");
    dec_cmd->add_option("--config", dc_config, "JSON config file");
    dec_cmd->add_option("--out", dc_out, "output directory");

    // ---- inspect-checkpoint ----------------------------------------------
    auto* ins_cmd = app.add_subcommand("inspect-checkpoint", "print checkpoint metadata");
    std::string in_net;
    ins_cmd->add_option("--net", in_net, "checkpoint path")->required();

    // ---- analyze ---------------------------------------------------------
    auto* ana_cmd = app.add_subcommand("analyze", "appendix experiments");
    ana_cmd->require_subcommand(1);

    auto* toy_cmd = ana_cmd->add_subcommand("toy-nn", "1-nearest-neighbor toy experiment");
    ToyLatticeConfig toy_cfg;
    int toy_reps = 100;
    std::string toy_out, toy_config;
    auto* o_tl = toy_cmd->add_option("--l", toy_cfg.side, "2D lattice side");
    auto* o_tp = toy_cmd->add_option("--p", toy_cfg.p, "flip fraction");
    auto* o_tdb = toy_cmd->add_option("--db", toy_cfg.db_size, "database entries");
    auto* o_trep = toy_cmd->add_option("--reps", toy_reps, "repetitions");
    auto* o_tseed = toy_cmd->add_option("--seed", toy_cfg.seed, "run seed");
    toy_cmd->add_option("--config", toy_config, "JSON config file");
    toy_cmd->add_option("--out", toy_out, "output directory");

    auto* paths_cmd = ana_cmd->add_subcommand("paths", "connectivity path counts");
    int pa_m = 4, pa_n = 7;
    std::string pa_out;
    paths_cmd->add_option("--m", pa_m, "layers including input");
    paths_cmd->add_option("--n", pa_n, "input width");
    paths_cmd->add_option("--out", pa_out, "output directory");

    auto* var_cmd = ana_cmd->add_subcommand("variance", "variance vs path count");
    int va_m = 4, va_n = 7, va_trials = 600;
    double va_sigma = 0.1;
    uint64_t va_seed = 12345;
    std::string va_out;
    var_cmd->add_option("--m", va_m, "layers including input");
    var_cmd->add_option("--n", va_n, "input width");
    var_cmd->add_option("--trials", va_trials, "random initializations");
    var_cmd->add_option("--sigma", va_sigma, "init standard deviation");
    var_cmd->add_option("--seed", va_seed, "run seed");
    var_cmd->add_option("--out", va_out, "output directory");

    auto* ali_cmd = ana_cmd->add_subcommand("aligned", "aligned vs reversed generalization");
    AlignedConfig ali_cfg;
    int ali_runs = 20;
    std::string ali_out;
    ali_cmd->add_option("--n", ali_cfg.input_n, "input side (7 or 9)");
    ali_cmd->add_option("--runs", ali_runs, "independent runs");
    ali_cmd->add_flag("--noisy", ali_cfg.noisy, "noisy variant with relu hidden layers");
    ali_cmd->add_option("--seed", ali_cfg.seed, "run seed");
    ali_cmd->add_option("--out", ali_out, "output directory");

    auto* sen_cmd = ana_cmd->add_subcommand("sensitivity", "output sensitivity vs input distance");
    std::string se_net, se_out;
    int se_side = 9, se_reps = 20, se_maxdist = -1;
    double se_p = 0.17;
    uint64_t se_seed = 12345;
    sen_cmd->add_option("--net", se_net, "checkpoint path")->required();
    sen_cmd->add_option("--l", se_side, "evaluation lattice side");
    sen_cmd->add_option("--reps", se_reps, "picks per distance");
    sen_cmd->add_option("--max-dist", se_maxdist, "largest L1 distance (default 2D+1)");
    sen_cmd->add_option("--p", se_p, "reference error rate");
    sen_cmd->add_option("--seed", se_seed, "run seed");
    sen_cmd->add_option("--out", se_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // usage error
    }

    try {
        if (*train_cmd) {
            const json file = load_config_file(tr_config);
            cfg_override(file, "model", o_model, tr_model);
            cfg_override(file, "dim", o_dim, tr_dim);
            cfg_override(file, "l", o_side, tr_side);
            cfg_override(file, "channels", o_ch, tr_channels);
            cfg_override(file, "p", o_p, tr_p);
            cfg_override(file, "p_range", o_pr, tr_prange);
            cfg_override(file, "q", o_q, tr_q);
            cfg_override(file, "samples", o_samples, tr_samples);
            cfg_override(file, "epochs", o_epochs, tr_epochs);
            cfg_override(file, "batch", o_batch, tr_batch);
            cfg_override(file, "eta0", o_eta, tr_eta0);
            cfg_override(file, "seed", o_seed_t, tr_seed);

            TrainingRunConfig cfg;
            if (tr_model != "a" && tr_model != "b")
                throw std::invalid_argument("--model must be a or b");
            cfg.model = tr_model[0];
            cfg.dim = tr_dim;
            cfg.train_side = tr_side > 0 ? tr_side : (tr_dim == 4 ? 4 : 6);
            cfg.hidden_channels = tr_channels > 0 ? tr_channels : (cfg.model == 'b' ? 20 : 15);
            if (cfg.model == 'a') {
                cfg.p_lo = tr_dim == 4 ? 0.03 : 0.17;
                cfg.p_hi = tr_dim == 4 ? 0.07 : 0.17;
                cfg.q = 0.0;
            } else {
                cfg.p_lo = 0.02;
                cfg.p_hi = 0.03;
                cfg.q = tr_q >= 0 ? tr_q : 0.025;
            }
            if (tr_p >= 0) cfg.p_lo = cfg.p_hi = tr_p;
            if (!tr_prange.empty()) {
                const auto pos = tr_prange.find(':');
                if (pos == std::string::npos) throw std::invalid_argument("p range must be lo:hi");
                cfg.p_lo = std::stod(tr_prange.substr(0, pos));
                cfg.p_hi = std::stod(tr_prange.substr(pos + 1));
            }
            cfg.samples = tr_samples > 0 ? tr_samples : (tr_dim == 4 ? 200000 : 100000);
            cfg.hyper.epochs = tr_epochs;
            cfg.hyper.batch_size = tr_batch;
            cfg.hyper.eta0 = tr_eta0;
            cfg.seed = tr_seed;

            json resolved{{"model", tr_model},     {"dim", cfg.dim},
                          {"l", cfg.train_side},   {"channels", cfg.hidden_channels},
                          {"p_lo", cfg.p_lo},      {"p_hi", cfg.p_hi},
                          {"q", cfg.q},            {"samples", cfg.samples},
                          {"epochs", cfg.hyper.epochs}, {"batch", cfg.hyper.batch_size},
                          {"eta0", cfg.hyper.eta0}, {"seed", cfg.seed},
                          {"workers", workers}};
            return run_guarded("train", resolved, tr_out, [&](RunContext& ctx) {
                const TrainResult res = train(cfg, workers, [](const TrainLogRow& row) {
                    std::cout << "epoch " << row.epoch << " train " << row.train_cost << " val "
                              << row.val_cost << " lr " << row.lr << "\n";
                });
                const std::string ckpt = (ctx.dir() / "checkpoint.json").string();
                save_checkpoint(res.net, ckpt);
                ctx.note_checkpoint(ckpt, res.net);
                ctx.write_artifact("training_log.csv", training_log_csv(res.log));
                std::cout << "best validation cost " << res.best_val_cost << " (uniform baseline "
                          << res.uniform_baseline_cost << ")\n";
            });
        }

        if (*sweep_cmd) {
            const json file = load_config_file(sw_config);
            cfg_override(file, "dim", o_swdim, sw_dim);
            cfg_override(file, "l", o_swl, sw_l);
            cfg_override(file, "p", o_swp, sw_p);
            cfg_override(file, "trials", o_swt, sw_trials);
            cfg_override(file, "seed", o_swseed, sw_seed);
            cfg_override(file, "flip_divisor", o_swx, sw_dec.flip_divisor);

            SweepConfig cfg;
            cfg.dim = sw_dim;
            cfg.sides = parse_int_list(sw_l);
            cfg.ps = parse_p_spec(sw_p);
            cfg.trials = sw_trials;
            cfg.decoder = sw_dec;
            cfg.seed = sw_seed;

            json resolved{{"net", sw_net},   {"dim", cfg.dim},     {"l", sw_l},
                          {"p", sw_p},       {"trials", cfg.trials}, {"seed", cfg.seed},
                          {"flip_divisor", sw_dec.flip_divisor}, {"workers", workers}};
            return run_guarded("sweep", resolved, sw_out, [&](RunContext& ctx) {
                const Network net = load_checkpoint(sw_net);
                if (net.dim != cfg.dim)
                    throw std::invalid_argument("checkpoint dimension " + std::to_string(net.dim) +
                                                " does not match requested --dim " +
                                                std::to_string(cfg.dim));
                ctx.note_checkpoint(sw_net, net);
                const auto rows = run_noiseless_sweep(net, cfg, workers);
                ctx.write_artifact("sweep.csv", sweep_csv(rows));
                for (const auto& r : rows)
                    std::cout << "L=" << r.side << " p=" << r.p << " p_bar=" << r.p_bar << " ["
                              << r.ci95.lo << ", " << r.ci95.hi << "]\n";
            });
        }

        if (*mem_cmd) {
            const json file = load_config_file(mm_config);
            cfg_override(file, "l", o_mml, mm_l);
            cfg_override(file, "p", o_mmp, mm_p);
            cfg_override(file, "runs", o_mmr, mm_runs);
            cfg_override(file, "round_cap", o_mmc, mm_cap);
            cfg_override(file, "round_budget", o_mmb, mm_round_budget);
            cfg_override(file, "seed", o_mmseed, mm_seed);

            MemoryTimeConfig cfg;
            cfg.sides = parse_int_list(mm_l);
            cfg.p = mm_p;
            cfg.runs = mm_runs;
            cfg.round_cap = mm_cap;
            cfg.decoder.noisy_round_budget = mm_round_budget;
            cfg.seed = mm_seed;

            json resolved{{"net_b", mm_net_b}, {"net_a", mm_net_a},       {"l", mm_l},
                          {"p", cfg.p},        {"runs", cfg.runs},        {"round_cap", cfg.round_cap},
                          {"round_budget", mm_round_budget}, {"seed", cfg.seed}, {"workers", workers}};
            return run_guarded("memory", resolved, mm_out, [&](RunContext& ctx) {
                const Network net_b = load_checkpoint(mm_net_b);
                const Network net_a = load_checkpoint(mm_net_a);
                if (net_b.dim != net_a.dim)
                    throw std::invalid_argument("checkpoint dimensions disagree");
                cfg.dim = net_b.dim;
                ctx.note_checkpoint(mm_net_b, net_b);
                ctx.note_checkpoint(mm_net_a, net_a);
                const auto records = run_memory_time(net_b, net_a, cfg, workers);
                ctx.write_artifact("memory.csv", memory_csv(records));
                for (int side : cfg.sides) {
                    const CensoredMean est = memory_time_estimate(records, side);
                    if (est.defined)
                        std::cout << "L=" << side << " T=" << est.t_hat << " 80% CI [" << est.ci.lo
                                  << ", " << est.ci.hi << "] failures=" << est.failures
                                  << " censored=" << est.censored << "\n";
                    else
                        std::cout << "L=" << side << " no failures observed (estimate undefined)\n";
                }
            });
        }

        if (*fit_cmd) {
            json resolved{{"input", ft_input}};
            return run_guarded("fit", resolved, ft_out, [&](RunContext& ctx) {
                const auto points = parse_sweep_csv(read_text_file(ft_input));
                const ScalingFit fit = fit_scaling(points);
                ctx.write_artifact("fit.csv", fit_csv(fit));
                std::cout << "p_c = " << fit.p_c << " +- " << std::sqrt(std::max(0.0, fit.cov[3][3]))
                          << ", nu = " << fit.nu << " +- " << std::sqrt(std::max(0.0, fit.cov[4][4]))
                          << (fit.identifiable ? "" : "  [UNIDENTIFIABLE]") << "\n";
            });
        }

        if (*dec_cmd) {
            const json file = load_config_file(dc_config);
            cfg_override(file, "l", o_dcl, dc_side);
            cfg_override(file, "p", o_dcp, dc_p);
            cfg_override(file, "seed", o_dcseed, dc_seed);
            json resolved{{"net", dc_net}, {"l", dc_side}, {"p", dc_p}, {"seed", dc_seed}};
            return run_guarded("decode-one", resolved, dc_out, [&](RunContext& ctx) {
                const Network net = load_checkpoint(dc_net);
                const LatticeGeometry geom(net.dim, dc_side);
                Rng rng(dc_seed);
                const ErrorConfig err = sample_error(geom, dc_p, rng);
                std::vector<DecodeTraceStep> trace;
                const DecodeOutcome out = nn_decode(net, err, {}, dc_trace ? &trace : nullptr);
                ctx.note_checkpoint(dc_net, net);
                json j{{"status", out.status == DecodeStatus::corrected_trivial ? "corrected-trivial"
                                  : out.status == DecodeStatus::logical_failure ? "logical-failure"
                                                                                : "timeout"},
                       {"nn_steps", out.nn_steps},
                       {"line_sweeps", out.line_sweeps},
                       {"residual_weight", out.residual_weight},
                       {"class_bits", out.class_bits},
                       {"total_flips", out.total_flips},
                       {"error_weight", err.bits.count()}};
                ctx.write_artifact("outcome.json", j.dump(1));
                if (dc_trace) {
                    std::ostringstream ss;
                    for (const auto& t : trace)
                        ss << json{{"step", t.step}, {"weight", t.weight_before}, {"flips", t.flips}}
                                  .dump()
                           << "\n";
                    ctx.write_artifact("trace.jsonl", ss.str());
                }
                std::cout << j.dump(1) << "\n";
            });
        }

        if (*ins_cmd) {
            std::cout << checkpoint_summary(in_net) << "\n";
            return 0;
        }

        if (*toy_cmd) {
            const json file = load_config_file(toy_config);
            cfg_override(file, "l", o_tl, toy_cfg.side);
            cfg_override(file, "p", o_tp, toy_cfg.p);
            cfg_override(file, "db", o_tdb, toy_cfg.db_size);
            cfg_override(file, "reps", o_trep, toy_reps);
            cfg_override(file, "seed", o_tseed, toy_cfg.seed);
            json resolved{{"l", toy_cfg.side}, {"p", toy_cfg.p}, {"db", toy_cfg.db_size},
                          {"reps", toy_reps},  {"seed", toy_cfg.seed}};
            return run_guarded("analyze-toy-nn", resolved, toy_out, [&](RunContext& ctx) {
                const ToyOverlapStats stats = nn_toy_overlap_experiment(toy_cfg, toy_reps);
                std::ostringstream ss;
                ss << "rep,max_overlap,weight_before,weight_after\n";
                for (size_t i = 0; i < stats.reps.size(); ++i)
                    ss << i << ',' << stats.reps[i].max_overlap << ',' << stats.reps[i].weight_before
                       << ',' << stats.reps[i].weight_after << '\n';
                ctx.write_artifact("toy_nn.csv", ss.str());
                std::cout << "mean max overlap " << stats.mean_max_overlap << " (weight "
                          << stats.mean_weight_before << " -> " << stats.mean_weight_after << ")\n";
            });
        }

        if (*paths_cmd) {
            json resolved{{"m", pa_m}, {"n", pa_n}};
            return run_guarded("analyze-paths", resolved, pa_out, [&](RunContext& ctx) {
                std::ostringstream ss, line;
                ss << "position,count\n";
                for (int k = 0; k < pa_n; ++k) {
                    const long c = count_paths(pa_m, pa_n, k);
                    ss << k << ',' << c << '\n';
                    line << (k ? "," : "") << c;
                }
                ctx.write_artifact("paths.csv", ss.str());
                std::cout << line.str() << "\n";
            });
        }

        if (*var_cmd) {
            json resolved{{"m", va_m}, {"n", va_n}, {"trials", va_trials},
                          {"sigma", va_sigma}, {"seed", va_seed}};
            return run_guarded("analyze-variance", resolved, va_out, [&](RunContext& ctx) {
                LocalNetSpec spec;
                spec.depth_m = va_m;
                spec.input_n = va_n;
                spec.dims = 1;
                spec.channels = 1;
                spec.init_sigma = va_sigma;
                const auto pts = variance_vs_paths_experiment(spec, va_trials, va_seed);
                std::ostringstream ss;
                ss << "position,variance,paths\n";
                for (const auto& pt : pts)
                    ss << pt.position << ',' << format_double(pt.variance) << ',' << pt.paths << '\n';
                ctx.write_artifact("variance.csv", ss.str());
                std::cout << "center/corner variance ratio "
                          << pts[va_n / 2].variance / pts[0].variance << "\n";
            });
        }

        if (*ali_cmd) {
            json resolved{{"n", ali_cfg.input_n}, {"runs", ali_runs}, {"noisy", ali_cfg.noisy},
                          {"seed", ali_cfg.seed}};
            return run_guarded("analyze-aligned", resolved, ali_out, [&](RunContext& ctx) {
                const auto runs = aligned_reversed_experiment(ali_cfg, ali_runs);
                std::ostringstream ss;
                ss << "run,converged,steps,final_cost,reversed_matches_center,aligned_accuracy\n";
                int center = 0;
                for (const auto& r : runs) {
                    ss << r.run << ',' << (r.converged ? 1 : 0) << ',' << r.steps << ','
                       << format_double(r.final_cost) << ',' << (r.reversed_matches_center ? 1 : 0)
                       << ',' << format_double(r.aligned_accuracy) << '\n';
                    center += r.converged && r.reversed_matches_center;
                }
                ctx.write_artifact("aligned.csv", ss.str());
                std::cout << center << "/" << ali_runs << " runs output the center bit on reversed inputs\n";
            });
        }

        if (*sen_cmd) {
            json resolved{{"net", se_net}, {"l", se_side}, {"reps", se_reps},
                          {"p", se_p},     {"seed", se_seed}};
            return run_guarded("analyze-sensitivity", resolved, se_out, [&](RunContext& ctx) {
                const Network net = load_checkpoint(se_net);
                const LatticeGeometry geom(net.dim, se_side);
                ctx.note_checkpoint(se_net, net);
                const int top = se_maxdist > 0 ? se_maxdist : 2 * net.dim + 1;
                std::vector<int> dists;
                for (int d = 0; d <= top; ++d) dists.push_back(d);
                const auto pts = sensitivity_vs_distance(net, geom, dists, se_reps, se_p, se_seed);
                std::ostringstream ss;
                ss << "distance,sensitivity\n";
                for (const auto& pt : pts)
                    ss << pt.distance << ',' << format_double(pt.mean_abs_delta) << '\n';
                ctx.write_artifact("sensitivity.csv", ss.str());
                for (const auto& pt : pts)
                    std::cout << "d=" << pt.distance << "  " << pt.mean_abs_delta << "\n";
            });
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
