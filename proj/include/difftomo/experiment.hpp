#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace difftomo {

// Flat key=value experiment description; unknown keys are rejected and the
// canonical serialization is stable (fixed key order, 17 significant digits).
struct ExperimentConfig {
    int n = 7;
    int p = 0;           // 0 means default 2n-1
    double kappa = 0.0;  // 0 means default pi

    std::string phantom = "builtin:blobs";  // or pgm:<path>
    std::string scheme = "tset";             // tset | random | conical | dual_axis | file:<path>
    int scheme_count = 0;                    // random/conical direction count (0 = default)
    int scheme_q = 8;                        // dual_axis arc resolution
    double scheme_alpha = 0.0;               // dual_axis tilt offset
    double epsilon = 0.0;                    // 0 means default 0.5/n

    std::uint64_t seed = 1;
    bool mask = true;
    bool oversampled = false;
    bool real_constraint = true;

    std::string solver = "ap";  // ap | vandermonde | unwrap
    std::vector<double> nsr;    // empty = noiseless only
    int ap_iters = 500;
    double cg_tol = 1e-10;
    int cg_max_iters = 200;

    std::string out = "out";
};

ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

// Full pipeline: phantom -> scheme -> mask -> simulate -> (noise ->
// reconstruct -> score) per NSR; writes metrics.csv, volumes, scheme and
// pattern files under config.out. Returns a process exit code; failures name
// the stage on err.
int run_experiment(const ExperimentConfig& config, std::string* err = nullptr);

}  // namespace difftomo
