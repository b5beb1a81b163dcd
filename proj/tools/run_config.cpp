#include "run_config.hpp"

#include <algorithm>
#include <stdexcept>

namespace ftv::cli {

using nlohmann::json;

namespace {

template <class F>
void strict_items(const json& j, const std::string& what, F&& f) {
    if (!j.is_object()) {
        throw std::invalid_argument(what + " must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!f(key, value)) {
            throw std::invalid_argument(what + ": unknown key '" + key + "'");
        }
    }
}

json denoise_json(const DenoiseConfig& c) {
    return {{"input", c.input},
            {"dim", c.dim},
            {"sigma", c.sigma ? json(*c.sigma) : json(nullptr)},
            {"estimate_sigma", c.estimate_sigma},
            {"kappa", c.kappa},
            {"n", c.n},
            {"frame", to_json(c.frame)},
            {"solver", to_json(c.solver)}};
}

void merge_denoise(DenoiseConfig& c, const json& j) {
    strict_items(j, "denoise", [&](const std::string& k, const json& v) {
        if (k == "input") {
            c.input = v.get<std::string>();
        } else if (k == "dim") {
            c.dim = v.get<int>();
        } else if (k == "sigma") {
            c.sigma = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
        } else if (k == "estimate_sigma") {
            c.estimate_sigma = v.get<bool>();
        } else if (k == "kappa") {
            c.kappa = v.get<double>();
        } else if (k == "n") {
            c.n = v.get<long long>();
        } else if (k == "frame") {
            c.frame = frame_from_json(v);
        } else if (k == "solver") {
            c.solver = solver_config_from_json(v);
        } else {
            return false;
        }
        return true;
    });
}

json simulate_json(const SimulateConfig& c) {
    return {{"truth", c.truth},   {"truth_params", c.truth_params}, {"dim", c.dim},
            {"side", c.side},     {"sigma", c.sigma},               {"n", c.n},
            {"kappa", c.kappa},   {"frame", to_json(c.frame)},      {"replicate", c.replicate},
            {"format", c.format}};
}

void merge_simulate(SimulateConfig& c, const json& j) {
    strict_items(j, "simulate", [&](const std::string& k, const json& v) {
        if (k == "truth") {
            c.truth = v.get<std::string>();
        } else if (k == "truth_params") {
            c.truth_params = v;
        } else if (k == "dim") {
            c.dim = v.get<int>();
        } else if (k == "side") {
            c.side = v.get<int>();
        } else if (k == "sigma") {
            c.sigma = v.get<double>();
        } else if (k == "n") {
            c.n = v.get<long long>();
        } else if (k == "kappa") {
            c.kappa = v.get<double>();
        } else if (k == "frame") {
            c.frame = frame_from_json(v);
        } else if (k == "replicate") {
            c.replicate = v.get<std::uint64_t>();
        } else if (k == "format") {
            c.format = v.get<std::string>();
        } else {
            return false;
        }
        return true;
    });
}

json bench_json(const BenchConfig& c) {
    json e = to_json(c.experiment);
    e.erase("seed");
    return e;
}

void merge_bench(BenchConfig& c, const json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("bench must be a JSON object");
    }
    if (j.contains("seed")) {
        throw std::invalid_argument("bench: the seed is set at the top level of the config");
    }
    json full = bench_json(c);
    for (const auto& [k, v] : j.items()) {
        if (!full.contains(k)) {
            throw std::invalid_argument("bench: unknown key '" + k + "'");
        }
        full[k] = v;
    }
    const auto seed = c.experiment.seed;
    c.experiment = experiment_from_json(full);
    c.experiment.seed = seed;
}

json diagnose_json(const DiagnoseConfig& c) {
    const auto& s = c.source;
    json source = {{"kind", s.kind}};
    if (s.kind == "file") {
        source["path"] = s.path;
    } else if (s.kind == "truth") {
        source["truth"] = s.truth;
        source["truth_params"] = s.truth_params;
        source["dim"] = s.dim;
        source["side"] = s.side;
    } else {
        source["dim"] = s.dim;
        source["side"] = s.side;
        if (s.kind == "atom") {
            source["scale"] = s.scale;
            source["position"] = s.position;
            source["type"] = s.type;
        }
    }
    json corpus = nullptr;
    if (c.corpus) {
        corpus = {{"dim", c.corpus->dim}, {"side", c.corpus->side}, {"count", c.corpus->count}, {"q", c.corpus->q}};
    }
    return {{"source", source},
            {"q", c.q},
            {"n", c.n},
            {"vanishing_moments", c.vanishing_moments},
            {"madic", to_json(c.madic)},
            {"corpus", corpus}};
}

void merge_diagnose(DiagnoseConfig& c, const json& j) {
    strict_items(j, "diagnose", [&](const std::string& k, const json& v) {
        if (k == "source") {
            auto& s = c.source;
            strict_items(v, "diagnose.source", [&](const std::string& sk, const json& sv) {
                if (sk == "kind") {
                    s.kind = sv.get<std::string>();
                } else if (sk == "path") {
                    s.path = sv.get<std::string>();
                } else if (sk == "truth") {
                    s.truth = sv.get<std::string>();
                } else if (sk == "truth_params") {
                    s.truth_params = sv;
                } else if (sk == "dim") {
                    s.dim = sv.get<int>();
                } else if (sk == "side") {
                    s.side = sv.get<int>();
                } else if (sk == "scale") {
                    s.scale = sv.get<int>();
                } else if (sk == "position") {
                    s.position = sv.get<std::array<int, 3>>();
                } else if (sk == "type") {
                    s.type = sv.get<int>();
                } else {
                    return false;
                }
                return true;
            });
            static const char* kinds[] = {"file", "truth", "atom", "zero", "random_bounded"};
            if (std::find(std::begin(kinds), std::end(kinds), s.kind) == std::end(kinds)) {
                throw std::invalid_argument("diagnose.source: unknown kind '" + s.kind + "'");
            }
        } else if (k == "q") {
            c.q = v.get<double>();
        } else if (k == "n") {
            c.n = v.get<long long>();
        } else if (k == "vanishing_moments") {
            c.vanishing_moments = v.get<int>();
        } else if (k == "madic") {
            c.madic = frame_from_json(v);
        } else if (k == "corpus") {
            if (v.is_null()) {
                c.corpus.reset();
                return true;
            }
            CorpusConfig cc;
            strict_items(v, "diagnose.corpus", [&](const std::string& ck, const json& cv) {
                if (ck == "dim") {
                    cc.dim = cv.get<int>();
                } else if (ck == "side") {
                    cc.side = cv.get<int>();
                } else if (ck == "count") {
                    cc.count = cv.get<int>();
                } else if (ck == "q") {
                    cc.q = cv.get<double>();
                } else {
                    return false;
                }
                return true;
            });
            c.corpus = cc;
        } else {
            return false;
        }
        return true;
    });
}

} // namespace

json to_json(const RunConfig& cfg) {
    json j = {{"command", cfg.command}, {"seed", cfg.seed}, {"threads", cfg.threads}, {"out", cfg.out}};
    if (cfg.command == "denoise") {
        j["denoise"] = denoise_json(cfg.denoise);
    } else if (cfg.command == "simulate") {
        j["simulate"] = simulate_json(cfg.simulate);
    } else if (cfg.command == "bench") {
        j["bench"] = bench_json(cfg.bench);
    } else if (cfg.command == "diagnose") {
        j["diagnose"] = diagnose_json(cfg.diagnose);
    }
    return j;
}

void merge_json(RunConfig& cfg, const json& j) {
    strict_items(j, "config", [&](const std::string& k, const json& v) {
        if (k == "command") {
            const auto name = v.get<std::string>();
            if (!cfg.command.empty() && name != cfg.command) {
                throw std::invalid_argument("config is for '" + name + "', not '" + cfg.command + "'");
            }
            cfg.command = name;
        } else if (k == "seed") {
            cfg.seed = v.get<std::uint64_t>();
        } else if (k == "threads") {
            cfg.threads = v.get<int>();
        } else if (k == "out") {
            cfg.out = v.get<std::string>();
        } else if (k == "denoise" || k == "simulate" || k == "bench" || k == "diagnose") {
            if (!cfg.command.empty() && k != cfg.command) {
                throw std::invalid_argument("config has a '" + k + "' section but the command is '" + cfg.command +
                                            "'");
            }
            if (k == "denoise") {
                merge_denoise(cfg.denoise, v);
            } else if (k == "simulate") {
                merge_simulate(cfg.simulate, v);
            } else if (k == "bench") {
                merge_bench(cfg.bench, v);
            } else {
                merge_diagnose(cfg.diagnose, v);
            }
        } else {
            return false;
        }
        return true;
    });
    if (cfg.threads < 0) {
        throw std::invalid_argument("threads must be >= 0");
    }
}

} // namespace ftv::cli
