#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ftv/analysis.hpp"

namespace ftv {

namespace {

using nlohmann::json;

std::string num(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json real_or_string(double v) {
    return std::isfinite(v) ? json(v) : json(num(v));
}

double real_from(const json& v, const std::string& key) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        throw std::invalid_argument(key + ": expected a number or \"inf\"");
    }
    return v.get<double>();
}

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

json fit_json(const RateFit& f) {
    return {{"slope", f.slope}, {"stderr", f.stderr_slope}, {"intercept", f.intercept}, {"points", f.points}};
}

} // namespace

json to_json(const FrameDescriptor& frame) {
    if (frame.kind == FrameKind::wavelet) {
        return {{"kind", "wavelet"}, {"vanishing_moments", frame.vanishing_moments}};
    }
    return {{"kind", "madic"},
            {"base", frame.base},
            {"kernel",
             {{"plateau_lo", frame.kernel.plateau_lo},
              {"plateau_hi", frame.kernel.plateau_hi},
              {"mollifier_radius", frame.kernel.mollifier_radius}}}};
}

FrameDescriptor frame_from_json(const json& j) {
    FrameDescriptor f;
    strict_items(j, "frame", [&](const std::string& key, const json& v) {
        if (key == "kind") {
            const auto k = v.get<std::string>();
            if (k != "wavelet" && k != "madic") {
                throw std::invalid_argument("frame: kind must be wavelet or madic");
            }
            f.kind = k == "wavelet" ? FrameKind::wavelet : FrameKind::madic;
        } else if (key == "vanishing_moments") {
            f.vanishing_moments = v.get<int>();
        } else if (key == "base") {
            f.base = v.get<int>();
        } else if (key == "kernel") {
            strict_items(v, "frame.kernel", [&](const std::string& k, const json& w) {
                if (k == "plateau_lo") {
                    f.kernel.plateau_lo = w.get<double>();
                } else if (k == "plateau_hi") {
                    f.kernel.plateau_hi = w.get<double>();
                } else if (k == "mollifier_radius") {
                    f.kernel.mollifier_radius = w.get<double>();
                } else {
                    return false;
                }
                return true;
            });
        } else {
            return false;
        }
        return true;
    });
    return f;
}

json to_json(const ExperimentSpec& s) {
    return {{"dim", s.dim},
            {"q", real_or_string(s.q)},
            {"truth", s.truth},
            {"truth_params", s.truth_params},
            {"frame", to_json(s.frame)},
            {"kappa", s.kappa},
            {"sigma", s.sigma},
            {"ladder", s.ladder},
            {"replicates", s.replicates},
            {"solver", to_json(s.solver)},
            {"estimator", estimator_name(s.estimator)},
            {"seed", s.seed},
            {"grid_side", s.grid_side},
            {"rof_lambdas", s.rof_lambdas}};
}

ExperimentSpec experiment_from_json(const json& j) {
    ExperimentSpec s;
    strict_items(j, "experiment", [&](const std::string& key, const json& v) {
        if (key == "dim") {
            s.dim = v.get<int>();
        } else if (key == "q") {
            s.q = real_from(v, "q");
        } else if (key == "truth") {
            s.truth = v.get<std::string>();
        } else if (key == "truth_params") {
            if (!v.is_object()) {
                throw std::invalid_argument("experiment: truth_params must be an object");
            }
            s.truth_params = v;
        } else if (key == "frame") {
            s.frame = frame_from_json(v);
        } else if (key == "kappa") {
            s.kappa = v.get<double>();
        } else if (key == "sigma") {
            s.sigma = v.get<double>();
        } else if (key == "ladder") {
            s.ladder = v.get<std::vector<long long>>();
        } else if (key == "replicates") {
            s.replicates = v.get<int>();
        } else if (key == "solver") {
            s.solver = solver_config_from_json(v);
        } else if (key == "estimator") {
            s.estimator = estimator_from_name(v.get<std::string>());
        } else if (key == "seed") {
            s.seed = v.get<std::uint64_t>();
        } else if (key == "grid_side") {
            s.grid_side = v.get<int>();
        } else if (key == "rof_lambdas") {
            s.rof_lambdas = v.get<std::vector<double>>();
        } else {
            return false;
        }
        return true;
    });
    return s;
}

std::string risk_csv_header() {
    return "d,q,n,estimator,mean_risk,stderr,reps,feas_freq,converged_frac";
}

std::string to_csv(const RiskReport& r) {
    std::ostringstream os;
    os << risk_csv_header() << '\n';
    for (const auto& p : r.points) {
        os << r.spec.dim << ',' << num(r.spec.q) << ',' << p.n << ',' << estimator_name(r.spec.estimator) << ','
           << num(p.mean_risk) << ',' << num(p.stderr_risk) << ',' << p.reps << ',' << num(p.feas_freq) << ','
           << num(p.converged_frac) << '\n';
    }
    return os.str();
}

json to_json(const RiskReport& r) {
    json points = json::array();
    for (const auto& p : r.points) {
        points.push_back({{"n", p.n},
                          {"side", p.side},
                          {"card", p.card},
                          {"gamma", p.gamma},
                          {"mean_risk", real_or_string(p.mean_risk)},
                          {"stderr", real_or_string(p.stderr_risk)},
                          {"reps", p.reps},
                          {"excluded", p.excluded},
                          {"feas_freq", p.feas_freq},
                          {"converged_frac", p.converged_frac},
                          {"mean_iterations", p.mean_iterations},
                          {"risks", p.risks}});
    }
    json fit = nullptr;
    if (r.fit) {
        const auto& c = r.fit->curvature;
        fit = {{"slope", r.fit->primary().slope},
               {"stderr", r.fit->primary().stderr_slope},
               {"all_points", fit_json(r.fit->all)},
               {"curvature",
                {{"applicable", c.applicable},
                 {"coefficient", c.coefficient},
                 {"t", real_or_string(c.t_statistic)},
                 {"p_value", c.p_value},
                 {"fired", c.fired}}},
               {"dropped_smallest", r.fit->dropped ? fit_json(*r.fit->dropped) : json(nullptr)}};
    }
    return {{"config", to_json(r.spec)},
            {"points", points},
            {"target_exponent", r.target},
            {"fit", fit},
            {"total_replicates", r.total_replicates},
            {"total_excluded", r.total_excluded},
            {"failed", r.failed},
            {"warnings", r.warnings}};
}

std::string to_svg(const RiskReport& r) {
    const double width = 640, height = 480, left = 80, right = 30, top = 40, bottom = 60;
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : r.points) {
        if (p.mean_risk > 0.0 && std::isfinite(p.mean_risk)) {
            pts.emplace_back(std::log10(static_cast<double>(p.n)), std::log10(p.mean_risk));
        }
    }
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (pts.empty()) {
        os << "<text x=\"" << width / 2 << "\" y=\"" << height / 2
           << "\" text-anchor=\"middle\">no positive risks</text>\n</svg>\n";
        return os.str();
    }
    double x0 = pts.front().first, x1 = x0, y0 = pts.front().second, y1 = y0;
    for (const auto& [x, y] : pts) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    // guide line through the first point with the target slope
    const double gy_end = pts.front().second + r.target * (x1 - pts.front().first);
    y0 = std::min(y0, gy_end);
    y1 = std::max(y1, gy_end);
    const double padx = std::max(0.1, 0.05 * (x1 - x0)), pady = std::max(0.1, 0.05 * (y1 - y0));
    x0 -= padx;
    x1 += padx;
    y0 -= pady;
    y1 += pady;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
    auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * (height - top - bottom); };

    os << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
       << height - bottom << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
       << "\" stroke=\"black\"/>\n";
    for (int k = static_cast<int>(std::ceil(x0)); k <= static_cast<int>(std::floor(x1)); ++k) {
        os << "<line x1=\"" << px(k) << "\" y1=\"" << height - bottom << "\" x2=\"" << px(k) << "\" y2=\""
           << height - bottom + 5 << "\" stroke=\"black\"/><text x=\"" << px(k) << "\" y=\"" << height - bottom + 20
           << "\" font-size=\"12\" text-anchor=\"middle\">1e" << k << "</text>\n";
    }
    for (int k = static_cast<int>(std::ceil(y0)); k <= static_cast<int>(std::floor(y1)); ++k) {
        os << "<line x1=\"" << left - 5 << "\" y1=\"" << py(k) << "\" x2=\"" << left << "\" y2=\"" << py(k)
           << "\" stroke=\"black\"/><text x=\"" << left - 8 << "\" y=\"" << py(k) + 4
           << "\" font-size=\"12\" text-anchor=\"end\">1e" << k << "</text>\n";
    }
    os << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 15
       << "\" font-size=\"14\" text-anchor=\"middle\">n</text>\n";
    os << "<text x=\"20\" y=\"" << (top + height - bottom) / 2 << "\" font-size=\"14\" transform=\"rotate(-90 20 "
       << (top + height - bottom) / 2 << ")\" text-anchor=\"middle\">mean L^" << num(r.spec.q) << " risk</text>\n";
    os << "<line x1=\"" << px(pts.front().first) << "\" y1=\"" << py(pts.front().second) << "\" x2=\"" << px(x1 - padx)
       << "\" y2=\"" << py(gy_end) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
    std::string path;
    for (const auto& [x, y] : pts) {
        os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"4\" fill=\"steelblue\"/>\n";
        path += (path.empty() ? "M" : " L") + num(px(x)) + " " + num(py(y));
    }
    os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"steelblue\"/>\n";
    os << "<text x=\"" << left + 10 << "\" y=\"" << top - 15 << "\" font-size=\"13\">" << estimator_name(r.spec.estimator)
       << ", d=" << r.spec.dim << "; guide slope " << num(r.target);
    if (r.fit) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "; fitted %.3f", r.fit->primary().slope);
        os << buf;
    }
    os << "</text>\n</svg>\n";
    return os.str();
}

} // namespace ftv
