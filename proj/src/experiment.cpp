#include "difftomo/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "difftomo/phantom.hpp"
#include "difftomo/recon.hpp"
#include "difftomo/rng.hpp"

namespace difftomo {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw std::invalid_argument("config: boolean expected for " + key + ", got " + v);
}

std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value, got: " + line);
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key == "n") cfg.n = std::stoi(value);
        else if (key == "p") cfg.p = std::stoi(value);
        else if (key == "kappa") cfg.kappa = std::stod(value);
        else if (key == "phantom") cfg.phantom = value;
        else if (key == "scheme") cfg.scheme = value;
        else if (key == "scheme_count") cfg.scheme_count = std::stoi(value);
        else if (key == "scheme_q") cfg.scheme_q = std::stoi(value);
        else if (key == "scheme_alpha") cfg.scheme_alpha = std::stod(value);
        else if (key == "epsilon") cfg.epsilon = std::stod(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "mask") cfg.mask = parse_bool(value, key);
        else if (key == "oversampled") cfg.oversampled = parse_bool(value, key);
        else if (key == "real_constraint") cfg.real_constraint = parse_bool(value, key);
        else if (key == "solver") cfg.solver = value;
        else if (key == "nsr") cfg.nsr = parse_list(value);
        else if (key == "ap_iters") cfg.ap_iters = std::stoi(value);
        else if (key == "cg_tol") cfg.cg_tol = std::stod(value);
        else if (key == "cg_max_iters") cfg.cg_max_iters = std::stoi(value);
        else if (key == "out") cfg.out = value;
        else throw std::invalid_argument("config: unknown key: " + key);
    }
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "n = " << cfg.n << "\n";
    out << "p = " << cfg.p << "\n";
    out << "kappa = " << fmt(cfg.kappa) << "\n";
    out << "phantom = " << cfg.phantom << "\n";
    out << "scheme = " << cfg.scheme << "\n";
    out << "scheme_count = " << cfg.scheme_count << "\n";
    out << "scheme_q = " << cfg.scheme_q << "\n";
    out << "scheme_alpha = " << fmt(cfg.scheme_alpha) << "\n";
    out << "epsilon = " << fmt(cfg.epsilon) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "mask = " << (cfg.mask ? "on" : "off") << "\n";
    out << "oversampled = " << (cfg.oversampled ? "on" : "off") << "\n";
    out << "real_constraint = " << (cfg.real_constraint ? "on" : "off") << "\n";
    out << "solver = " << cfg.solver << "\n";
    out << "nsr = ";
    for (std::size_t i = 0; i < cfg.nsr.size(); ++i)
        out << (i ? "," : "") << fmt(cfg.nsr[i]);
    out << "\n";
    out << "ap_iters = " << cfg.ap_iters << "\n";
    out << "cg_tol = " << fmt(cfg.cg_tol) << "\n";
    out << "cg_max_iters = " << cfg.cg_max_iters << "\n";
    out << "out = " << cfg.out << "\n";
    return out.str();
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

TiltScheme make_scheme(const ExperimentConfig& cfg, const LatticeSpec& spec,
                       std::uint64_t scheme_seed) {
    TiltScheme scheme;
    if (cfg.scheme == "tset") {
        scheme = tset_scheme(spec.n, scheme_seed);
    } else if (cfg.scheme == "random") {
        TriangleRegion region;
        region.with_anchors = true;
        int count = cfg.scheme_count > 0 ? cfg.scheme_count : 4 * spec.n;
        scheme = random_tilt_scheme(spec.n, region, count, scheme_seed);
    } else if (cfg.scheme == "conical") {
        scheme = conical_tilt_scheme(cfg.scheme_count > 0 ? cfg.scheme_count : 3 * spec.n);
    } else if (cfg.scheme == "dual_axis") {
        scheme = dual_axis_scheme(cfg.scheme_q, cfg.scheme_alpha);
    } else if (cfg.scheme.rfind("file:", 0) == 0) {
        scheme = load_scheme(cfg.scheme.substr(5));
    } else {
        throw std::invalid_argument("config: unknown scheme: " + cfg.scheme);
    }
    if (cfg.epsilon > 0.0) scheme.epsilon = cfg.epsilon;
    else if (scheme.epsilon <= 0.0) scheme.epsilon = 0.5 / spec.n;
    return scheme;
}

struct MetricsRow {
    double nsr = 0.0;
    int iterations = 0;
    double residual = 0.0;
    double corr = 0.0;
};

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::string* err) {
    std::string stage = "setup";
    try {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.out);
        LatticeSpec spec(cfg.n, cfg.p > 0 ? cfg.p : 2 * cfg.n - 1,
                         cfg.kappa > 0.0 ? cfg.kappa : pi);

        stage = "phantom";
        Object3D phantom;
        if (cfg.phantom.rfind("builtin:", 0) == 0)
            phantom = builtin_phantom(cfg.phantom.substr(8), spec);
        else if (cfg.phantom.rfind("pgm:", 0) == 0)
            phantom = build_phantom(load_pgm(cfg.phantom.substr(4)), spec);
        else
            throw std::invalid_argument("config: unknown phantom source: " + cfg.phantom);
        save_volume(phantom, cfg.out + "/phantom.vol");

        stage = "scheme";
        TiltScheme scheme = make_scheme(cfg, spec, Rng::derive_seed(cfg.seed, 1));
        save_scheme(scheme, cfg.out + "/scheme.txt");

        stage = "simulate";
        std::optional<PhaseMask> mask;
        if (cfg.mask) mask = random_phase_mask(spec, Rng::derive_seed(cfg.seed, 2));
        std::vector<MetricsRow> rows;

        if (cfg.solver == "ap") {
            OperatorFlags flags{cfg.oversampled, cfg.real_constraint};
            MeasurementOperator op = build_forward(scheme, mask, spec, flags);
            std::vector<cplx> y = op.forward(phantom);
            const int side = op.pattern_side();
            const std::size_t area = static_cast<std::size_t>(side) * side;

            std::vector<std::pair<Direction, DiffractionPattern>> patterns;
            for (std::size_t t = 0; t < scheme.directions.size(); ++t) {
                DiffractionPattern pat(spec, cfg.oversampled);
                for (std::size_t i = 0; i < area; ++i)
                    pat.intensities[i] = std::norm(y[t * area + i]);
                patterns.emplace_back(scheme.directions[t], std::move(pat));
            }
            save_patterns(patterns, cfg.out + "/patterns.pat");

            std::vector<double> targets = cfg.nsr.empty() ? std::vector<double>{0.0} : cfg.nsr;
            CgOptions cg{cfg.cg_tol, cfg.cg_max_iters};
            for (std::size_t row_idx = 0; row_idx < targets.size(); ++row_idx) {
                stage = "reconstruct";
                double target = targets[row_idx];
                std::vector<double> b(y.size());
                if (target <= 0.0) {
                    for (std::size_t i = 0; i < y.size(); ++i) b[i] = std::abs(y[i]);
                } else {
                    // Calibrate the interaction scale on the whole stack.
                    double b1 = 0.0, b2 = 0.0;
                    for (const auto& [dir, pat] : patterns)
                        for (double v : pat.intensities) {
                            b1 += std::sqrt(v);
                            b2 += v;
                        }
                    double root = b1 / (target * b2);
                    double s = root * root;
                    for (std::size_t t = 0; t < patterns.size(); ++t) {
                        NoiseSpec noise(s, Rng::derive_seed(cfg.seed, 100 + t));
                        DiffractionPattern counts = poissonize(patterns[t].second, noise);
                        for (std::size_t i = 0; i < area; ++i)
                            b[t * area + i] = std::sqrt(counts.intensities[i] / s);
                    }
                }
                ReconReport report = ap_reconstruct(op, b, Rng::derive_seed(cfg.seed, 3),
                                                    cfg.ap_iters, &phantom, cg);
                save_volume(report.final_object,
                            cfg.out + "/recon_" + std::to_string(row_idx) + ".vol");
                rows.push_back({target, report.iterations,
                                report.residual_history.empty()
                                    ? 0.0
                                    : report.residual_history.back(),
                                report.correlation_history.back()});
            }
        } else if (cfg.solver == "vandermonde") {
            stage = "reconstruct";
            std::vector<std::pair<Direction, Projection2D>> projections;
            for (const Direction& d : scheme.directions)
                projections.emplace_back(d, project(phantom, d));
            save_projections(projections, cfg.out + "/projections.prj");
            Object3D recon = vandermonde_tomography(projections, spec);
            double errn = 0.0;
            for (std::size_t i = 0; i < recon.values.size(); ++i)
                errn += std::norm(recon.values[i] - phantom.values[i]);
            rows.push_back({0.0, 1, std::sqrt(errn) / std::max(phantom.norm(), 1e-300),
                            correlation(recon, phantom)});
            save_volume(recon, cfg.out + "/recon_0.vol");
        } else if (cfg.solver == "unwrap") {
            stage = "reconstruct";
            const double period = 2.0 * pi / spec.kappa;
            std::vector<std::pair<Direction, Projection2D>> wrapped;
            for (const Direction& d : scheme.directions) {
                Projection2D proj = project(phantom, d);
                for (cplx& v : proj.values) {
                    double x = v.real();
                    v = x - period * std::round(x / period);
                }
                wrapped.emplace_back(d, std::move(proj));
            }
            save_projections(wrapped, cfg.out + "/wrapped.prj");
            UnwrapResult result = unwrap_tilt_series(wrapped, scheme, spec);
            rows.push_back({0.0, result.converged ? 1 : 0, result.residual,
                            correlation(result.object, phantom)});
            save_volume(result.object, cfg.out + "/recon_0.vol");
        } else {
            throw std::invalid_argument("config: unknown solver: " + cfg.solver);
        }

        stage = "metrics";
        std::ofstream metrics(cfg.out + "/metrics.csv", std::ios::binary);
        if (!metrics) throw std::runtime_error("cannot write metrics.csv");
        metrics << "nsr,iterations,residual,correlation\n";
        char buf[256];
        for (const MetricsRow& row : rows) {
            std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g\n", row.nsr, row.iterations,
                          row.residual, row.corr);
            metrics << buf;
        }
        return 0;
    } catch (const std::exception& e) {
        if (err) *err = stage + ": " + e.what();
        return 1;
    }
}

}  // namespace difftomo
