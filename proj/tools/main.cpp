#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "run_config.hpp"

using namespace ftv;
using namespace ftv::cli;

namespace {

FrameDescriptor frame_by_name(const std::string& name) {
    if (name == "wavelet") {
        return FrameDescriptor::wavelet();
    }
    if (name == "madic") {
        return FrameDescriptor::madic();
    }
    throw UsageError("--frame must be wavelet or madic");
}

template <class T>
void set_if(const std::optional<T>& flag, T& target) {
    if (flag) {
        target = *flag;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frame-constrained total-variation denoising on the periodic grid"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out;
    bool dump = false;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed");
    app.add_option("--threads", threads, "worker threads (0: all cores)");
    app.add_option("--out", out, "output directory");
    app.add_flag("--dump-config", dump, "print the resolved configuration and exit");

    // denoise
    auto* den = app.add_subcommand("denoise", "denoise a signal file");
    std::optional<std::string> d_input, d_frame;
    std::optional<double> d_sigma, d_kappa;
    std::optional<long long> d_n;
    std::optional<int> d_dim, d_iters;
    bool d_est = false;
    den->add_option("--input", d_input, "signal file (.csv, .pgm, .tsig)");
    den->add_option("--sigma", d_sigma, "white-noise level");
    den->add_flag("--estimate-sigma", d_est, "estimate sigma from the finest wavelet details");
    den->add_option("--kappa", d_kappa, "threshold multiplier");
    den->add_option("--n", d_n, "information level (default N^d)");
    den->add_option("--frame", d_frame, "wavelet or madic");
    den->add_option("--dim", d_dim, "expected dimension of the input");
    den->add_option("--max-iters", d_iters, "solver iteration cap");

    // simulate
    auto* sim = app.add_subcommand("simulate", "draw a truth, noisy pixels and observations");
    std::optional<std::string> s_truth, s_frame, s_format;
    std::optional<int> s_dim, s_side;
    std::optional<double> s_sigma, s_kappa;
    std::optional<long long> s_n;
    std::optional<std::uint64_t> s_rep;
    sim->add_option("--truth", s_truth, "truth library member");
    sim->add_option("--dim", s_dim);
    sim->add_option("--side", s_side, "grid side N");
    sim->add_option("--sigma", s_sigma);
    sim->add_option("--n", s_n, "information level (default N^d)");
    sim->add_option("--kappa", s_kappa);
    sim->add_option("--frame", s_frame, "wavelet or madic");
    sim->add_option("--replicate", s_rep);
    sim->add_option("--format", s_format, "tsig, csv or pgm");

    // bench
    auto* ben = app.add_subcommand("bench", "Monte Carlo risk over a ladder of n");
    std::optional<std::string> b_est, b_truth, b_frame;
    std::vector<long long> b_ladder;
    std::optional<int> b_reps, b_dim, b_grid;
    std::optional<double> b_sigma, b_kappa, b_q, b_tol;
    ben->add_option("--estimator", b_est, "frame_tv, rof_oracle, wavelet_threshold or identity");
    ben->add_option("--ladder", b_ladder, "comma-separated n values")->delimiter(',');
    ben->add_option("--replicates", b_reps);
    ben->add_option("--truth", b_truth);
    ben->add_option("--dim", b_dim);
    ben->add_option("--grid-side", b_grid, "fixed grid side (0: N^d = n)");
    ben->add_option("--sigma", b_sigma);
    ben->add_option("--kappa", b_kappa);
    ben->add_option("--q", b_q, "risk exponent");
    ben->add_option("--frame", b_frame, "wavelet or madic");
    ben->add_option("--rel-obj-tol", b_tol, "solver relative gap tolerance");

    // diagnose
    auto* dia = app.add_subcommand("diagnose", "Jackson, interpolation, Parseval and local-means checks");
    std::optional<std::string> g_input, g_truth, g_source;
    std::optional<int> g_dim, g_side, g_corpus, g_corpus_dim, g_corpus_side;
    std::optional<double> g_q;
    std::optional<long long> g_n;
    dia->add_option("--input", g_input, "signal file");
    dia->add_option("--truth", g_truth, "truth library member");
    dia->add_option("--source", g_source, "file, truth, atom, zero or random_bounded");
    dia->add_option("--dim", g_dim);
    dia->add_option("--side", g_side);
    dia->add_option("--q", g_q);
    dia->add_option("--n", g_n);
    dia->add_option("--corpus-count", g_corpus, "also compute the corpus constant over this many signals");
    dia->add_option("--corpus-dim", g_corpus_dim);
    dia->add_option("--corpus-side", g_corpus_side);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        RunConfig cfg;
        cfg.command = app.get_subcommands().front()->get_name();
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(f);
            } catch (const nlohmann::json::exception& e) {
                throw UsageError(std::string("cannot parse config: ") + e.what());
            }
            merge_json(cfg, j);
        }
        set_if(seed, cfg.seed);
        set_if(threads, cfg.threads);
        set_if(out, cfg.out);

        auto& dc = cfg.denoise;
        set_if(d_input, dc.input);
        if (d_sigma) {
            dc.sigma = d_sigma;
        }
        if (d_est) {
            dc.estimate_sigma = true;
        }
        set_if(d_kappa, dc.kappa);
        set_if(d_n, dc.n);
        set_if(d_dim, dc.dim);
        if (d_frame) {
            dc.frame = frame_by_name(*d_frame);
        }
        set_if(d_iters, dc.solver.max_iters);

        auto& sc = cfg.simulate;
        set_if(s_truth, sc.truth);
        set_if(s_dim, sc.dim);
        set_if(s_side, sc.side);
        set_if(s_sigma, sc.sigma);
        set_if(s_n, sc.n);
        set_if(s_kappa, sc.kappa);
        set_if(s_rep, sc.replicate);
        set_if(s_format, sc.format);
        if (s_frame) {
            sc.frame = frame_by_name(*s_frame);
        }

        auto& e = cfg.bench.experiment;
        if (b_est) {
            e.estimator = estimator_from_name(*b_est);
        }
        if (!b_ladder.empty()) {
            e.ladder = b_ladder;
        }
        set_if(b_reps, e.replicates);
        set_if(b_truth, e.truth);
        set_if(b_dim, e.dim);
        set_if(b_grid, e.grid_side);
        set_if(b_sigma, e.sigma);
        set_if(b_kappa, e.kappa);
        set_if(b_q, e.q);
        set_if(b_tol, e.solver.rel_obj_tol);
        if (b_frame) {
            e.frame = frame_by_name(*b_frame);
        }

        auto& gc = cfg.diagnose;
        if (g_input) {
            gc.source.kind = "file";
            gc.source.path = *g_input;
        }
        if (g_truth) {
            gc.source.kind = "truth";
            gc.source.truth = *g_truth;
        }
        set_if(g_source, gc.source.kind);
        set_if(g_dim, gc.source.dim);
        set_if(g_side, gc.source.side);
        set_if(g_q, gc.q);
        set_if(g_n, gc.n);
        if (g_corpus || g_corpus_dim || g_corpus_side) {
            CorpusConfig cc = gc.corpus.value_or(CorpusConfig{});
            set_if(g_corpus, cc.count);
            set_if(g_corpus_dim, cc.dim);
            set_if(g_corpus_side, cc.side);
            gc.corpus = cc;
        }
        // normalizes the flag-built config through the same strict reader
        RunConfig resolved;
        resolved.command = cfg.command;
        merge_json(resolved, to_json(cfg));
        if (resolved.threads < 0) {
            throw UsageError("--threads must be >= 0");
        }

        if (dump) {
            std::cout << to_json(resolved).dump(2) << "\n";
            return kExitOk;
        }
        if (resolved.command == "denoise") {
            return run_denoise(resolved, std::cout);
        }
        if (resolved.command == "simulate") {
            return run_simulate(resolved, std::cout);
        }
        if (resolved.command == "bench") {
            return run_bench(resolved, std::cout);
        }
        return run_diagnose(resolved, std::cout);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: bad config value: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
