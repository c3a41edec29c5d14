#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "difftomo/experiment.hpp"
#include "difftomo/phantom.hpp"
#include "difftomo/recon.hpp"
#include "difftomo/rng.hpp"

using namespace difftomo;

namespace {

TiltScheme scheme_by_name(const std::string& type, int n, int count, int q, double alpha,
                          std::uint64_t seed) {
    if (type == "tset") return tset_scheme(n, seed);
    if (type == "random") {
        TriangleRegion region;
        region.with_anchors = true;
        return random_tilt_scheme(n, region, count > 0 ? count : 4 * n, seed);
    }
    if (type == "conical") return conical_tilt_scheme(count > 0 ? count : 3 * n);
    if (type == "dual_axis") return dual_axis_scheme(q, alpha);
    throw CLI::ValidationError("unknown scheme type: " + type);
}

int run_verify() {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
        if (!ok) ++failures;
    };

    LatticeSpec spec(5, 9);
    Rng rng(7);
    Object3D f(spec);
    for (cplx& v : f.values) v = cplx(rng.normal(), rng.normal());

    check("dirichlet kernel periodic and lattice-exact",
          std::abs(dirichlet_kernel(3.7, spec) - dirichlet_kernel(3.7 + 9, spec)) < 1e-12 &&
              std::abs(dirichlet_kernel(0, spec) - 1.0) < 1e-15 &&
              std::abs(dirichlet_kernel(4, spec)) < 1e-12);

    Direction dir(Family::Z, 0.31, -0.57);
    check("fourier slice identity", verify_slice_theorem(f, dir) < 1e-9);

    {
        // Adjoint identity for the measurement operator.
        TiltScheme scheme = tset_scheme(5, 11);
        PhaseMask mask = random_phase_mask(spec, 13);
        MeasurementOperator op = build_forward(scheme, mask, spec, OperatorFlags{});
        Object3D g(spec);
        Rng rng2(21);
        for (cplx& v : g.values) v = cplx(rng2.normal(), rng2.normal());
        std::vector<cplx> y(op.measurement_size());
        for (cplx& v : y) v = cplx(rng2.normal(), rng2.normal());
        std::vector<cplx> fg = op.forward(g);
        Object3D at = op.adjoint(y);
        cplx lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) lhs += std::conj(fg[i]) * y[i];
        for (std::size_t i = 0; i < at.values.size(); ++i)
            rhs += std::conj(g.values[i]) * at.values[i];
        check("measurement operator adjoint identity", std::abs(lhs - rhs) < 1e-6 * std::abs(lhs));
    }

    {
        // Progressive Vandermonde solve round trip.
        Rng rng3(5);
        std::vector<double> nodes(5);
        for (double& v : nodes) v = rng3.uniform(-4.0, 4.0);
        std::vector<cplx> truth(5), rhs(5, cplx(0.0));
        for (cplx& v : truth) v = cplx(rng3.normal(), rng3.normal());
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                rhs[i] += truth[j] * unit_phase(-2.0 * pi * nodes[i] * (range_lo(5) + j) / 9.0);
        std::vector<cplx> solved = vandermonde_solve(nodes, rhs, spec);
        double err = 0.0;
        for (int j = 0; j < 5; ++j) err += std::abs(solved[j] - truth[j]);
        check("vandermonde solve round trip", err < 1e-8);
    }

    check("support bound formula",
          support_bounds(Direction(Family::X, 0.5, 0.99), LatticeSpec(7, 13)) ==
              std::make_pair(9, 11));

    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"difftomo: tomographic phase retrieval sandbox"};
    app.require_subcommand(1);

    // Upper bound on worker threads (the pipeline is deterministic either way).
    if (const char* threads = std::getenv("DIFFTOMO_THREADS")) {
        int t = std::atoi(threads);
        if (t < 1) {
            std::cerr << "DIFFTOMO_THREADS must be a positive integer\n";
            return 2;
        }
    }

    // phantom
    auto* phantom_cmd = app.add_subcommand("phantom", "build a slice-and-stack phantom volume");
    int ph_n = 16;
    std::string ph_source = "builtin:blobs", ph_out = "phantom.vol";
    phantom_cmd->add_option("--n", ph_n, "object extent per axis (k^2 = n)");
    phantom_cmd->add_option("--source", ph_source, "builtin:<name> or pgm:<path>");
    phantom_cmd->add_option("--out", ph_out, "output VOL1 path");

    // scheme
    auto* scheme_cmd = app.add_subcommand("scheme", "generate a tilt scheme file");
    std::string sc_type = "tset", sc_out = "scheme.txt";
    int sc_n = 7, sc_count = 0, sc_q = 8;
    double sc_alpha = 0.0;
    std::uint64_t sc_seed = 1;
    scheme_cmd->add_option("--type", sc_type, "tset | random | conical | dual_axis");
    scheme_cmd->add_option("--n", sc_n, "lattice extent");
    scheme_cmd->add_option("--count", sc_count, "direction count (random/conical)");
    scheme_cmd->add_option("--q", sc_q, "dual-axis arc resolution");
    scheme_cmd->add_option("--alpha", sc_alpha, "dual-axis tilt offset");
    scheme_cmd->add_option("--seed", sc_seed, "rng seed");
    scheme_cmd->add_option("--out", sc_out, "output scheme path");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "project a volume and emit patterns");
    std::string si_vol = "phantom.vol", si_scheme = "scheme.txt";
    std::string si_patterns = "patterns.pat", si_projections;
    std::uint64_t si_seed = 1;
    bool si_mask = true, si_oversampled = false;
    sim_cmd->add_option("--volume", si_vol, "input VOL1 volume");
    sim_cmd->add_option("--scheme", si_scheme, "input scheme file");
    sim_cmd->add_option("--seed", si_seed, "mask seed");
    sim_cmd->add_flag("--mask,!--no-mask", si_mask, "apply a random phase mask");
    sim_cmd->add_flag("--oversampled", si_oversampled, "oversample patterns to 2p-1");
    sim_cmd->add_option("--patterns", si_patterns, "output PAT1 path");
    sim_cmd->add_option("--projections", si_projections, "optional PRJ1 output");

    // reconstruct
    auto* rec_cmd = app.add_subcommand("reconstruct", "reconstruct a volume from measurements");
    std::string re_solver = "ap", re_patterns = "patterns.pat", re_projections;
    std::string re_scheme = "scheme.txt", re_out = "recon.vol";
    std::uint64_t re_seed = 1;
    int re_iters = 500;
    bool re_mask = true, re_real = true;
    rec_cmd->add_option("--solver", re_solver, "ap | vandermonde");
    rec_cmd->add_option("--patterns", re_patterns, "PAT1 input (ap)");
    rec_cmd->add_option("--projections", re_projections, "PRJ1 input (vandermonde)");
    rec_cmd->add_option("--scheme", re_scheme, "scheme file (ap)");
    rec_cmd->add_option("--seed", re_seed, "mask/init seed (must match simulate)");
    rec_cmd->add_option("--iters", re_iters, "AP iteration cap");
    rec_cmd->add_flag("--mask,!--no-mask", re_mask, "data were mask-coded");
    rec_cmd->add_flag("--real,!--complex", re_real, "impose a real-valued object");
    rec_cmd->add_option("--out", re_out, "output VOL1 path");

    // run
    auto* run_cmd = app.add_subcommand("run", "end-to-end experiment from a config file");
    std::string run_config;
    std::optional<std::uint64_t> run_seed;
    std::optional<std::string> run_out;
    run_cmd->add_option("--config", run_config, "key = value config file")->required();
    run_cmd->add_option("--seed", run_seed, "override config seed");
    run_cmd->add_option("--out", run_out, "override output directory");

    // verify
    auto* verify_cmd =
        app.add_subcommand("verify", "run the built-in invariant checks and report pass/fail");

    CLI11_PARSE(app, argc, argv);

    try {
        if (phantom_cmd->parsed()) {
            LatticeSpec spec = LatticeSpec::with_default_padding(ph_n);
            Object3D obj;
            if (ph_source.rfind("builtin:", 0) == 0)
                obj = builtin_phantom(ph_source.substr(8), spec);
            else if (ph_source.rfind("pgm:", 0) == 0)
                obj = build_phantom(load_pgm(ph_source.substr(4)), spec);
            else
                throw std::invalid_argument("phantom: source must be builtin:<name> or pgm:<path>");
            save_volume(obj, ph_out);
        } else if (scheme_cmd->parsed()) {
            save_scheme(scheme_by_name(sc_type, sc_n, sc_count, sc_q, sc_alpha, sc_seed),
                        sc_out);
        } else if (sim_cmd->parsed()) {
            Object3D vol = load_volume(si_vol);
            TiltScheme scheme = load_scheme(si_scheme);
            std::optional<PhaseMask> mask;
            if (si_mask) mask = random_phase_mask(vol.spec, Rng::derive_seed(si_seed, 2));
            MeasurementOperator op =
                build_forward(scheme, mask, vol.spec, OperatorFlags{si_oversampled, false});
            std::vector<cplx> y = op.forward(vol);
            const int side = op.pattern_side();
            const std::size_t area = static_cast<std::size_t>(side) * side;
            std::vector<std::pair<Direction, DiffractionPattern>> patterns;
            for (std::size_t t = 0; t < scheme.directions.size(); ++t) {
                DiffractionPattern pat(vol.spec, si_oversampled);
                for (std::size_t i = 0; i < area; ++i)
                    pat.intensities[i] = std::norm(y[t * area + i]);
                patterns.emplace_back(scheme.directions[t], std::move(pat));
            }
            save_patterns(patterns, si_patterns);
            if (!si_projections.empty()) {
                std::vector<std::pair<Direction, Projection2D>> projections;
                for (const Direction& d : scheme.directions)
                    projections.emplace_back(d, project(vol, d));
                save_projections(projections, si_projections);
            }
        } else if (rec_cmd->parsed()) {
            if (re_solver == "vandermonde") {
                if (re_projections.empty())
                    throw std::invalid_argument("reconstruct: vandermonde needs --projections");
                auto projections = load_projections(re_projections);
                save_volume(vandermonde_tomography(projections, projections.front().second.spec),
                            re_out);
            } else if (re_solver == "ap") {
                auto patterns = load_patterns(re_patterns);
                if (patterns.empty()) throw std::invalid_argument("reconstruct: empty patterns");
                TiltScheme scheme = load_scheme(re_scheme);
                const LatticeSpec& spec = patterns.front().second.spec;
                std::optional<PhaseMask> mask;
                if (re_mask) mask = random_phase_mask(spec, Rng::derive_seed(re_seed, 2));
                bool oversampled = patterns.front().second.oversampled;
                MeasurementOperator op =
                    build_forward(scheme, mask, spec, OperatorFlags{oversampled, re_real});
                std::vector<double> b;
                b.reserve(op.measurement_size());
                for (const auto& [dirn, pat] : patterns)
                    for (double v : pat.intensities) b.push_back(std::sqrt(v));
                ReconReport report =
                    ap_reconstruct(op, b, Rng::derive_seed(re_seed, 3), re_iters);
                save_volume(report.final_object, re_out);
            } else {
                throw std::invalid_argument("reconstruct: unknown solver: " + re_solver);
            }
        } else if (run_cmd->parsed()) {
            ExperimentConfig cfg = load_config(run_config);
            if (run_seed) cfg.seed = *run_seed;
            if (run_out) cfg.out = *run_out;
            std::string err;
            int rc = run_experiment(cfg, &err);
            if (rc != 0) std::cerr << "run failed at " << err << "\n";
            return rc;
        } else if (verify_cmd->parsed()) {
            return run_verify();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
