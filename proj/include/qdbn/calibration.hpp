#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qdbn/chimera.hpp"
#include "qdbn/rbm.hpp"
#include "qdbn/rng.hpp"
#include "qdbn/sampler.hpp"

namespace qdbn {

// Mean absolute difference between the joint-moment tables, over unmasked
// entries when a mask is given.
double vh_l1_error(const ExpectationSet& a, const ExpectationSet& b,
                   const MaskMatrix* mask = nullptr);

struct CalibrationReport {
    int n_visible = 0;
    int n_hidden = 0;
    std::vector<double> candidates;
    std::vector<double> l1_errors;  // mean over repetitions, per candidate
    double chosen = 0.0;
    int repetitions = 0;
    int reads_per_gauge = 0;
    std::string reference;  // "exact" or "mcmc"
};

struct CalibrationConfig {
    std::vector<double> candidates = {2.0, 3.0, 4.5};
    int repetitions = 10;
    double spread = 1.0;  // test RBMs drawn uniform in [-spread, spread]
    SamplerConfig sampler;  // template; beta_eff is overridden per candidate
    int reference_guard = kEnumerationGuard;
    int reference_burn = 2000;    // Gibbs fallback for sizes past the guard
    int reference_samples = 200000;
};

// Estimates model expectations for a candidate inverse temperature. The
// chimera backend is the production hook; tests substitute analytic stands-in.
using ExpectationFn =
    std::function<ExpectationSet(const RbmParams&, double beta_eff, Rng&)>;

// Core grid search: per repetition draw a random RBM, compute reference
// expectations (exact under the guard, long-run Gibbs otherwise), score every
// candidate by mean L1 distance on the joint moments, pick the argmin
// (first on ties). `mask` marks entries excluded from both RBM draws and
// the error.
CalibrationReport calibrate_with(int n_visible, int n_hidden,
                                 const CalibrationConfig& cfg,
                                 const ExpectationFn& sampler, Rng& rng,
                                 const MaskMatrix* mask = nullptr);

// Grid search against the simulated annealer on `graph`. Throws when the
// size does not embed.
CalibrationReport calibrate(int n_visible, int n_hidden, const CalibrationConfig& cfg,
                            const ChimeraGraph& graph, Rng& rng);

// Hardware-characterization defaults by layer size, used when no calibration
// run is requested.
double default_beta_for(int n_visible, int n_hidden);

}  // namespace qdbn
