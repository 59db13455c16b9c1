#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bnh/ktest.hpp"
#include "bnh/model.hpp"
#include "bnh/rng.hpp"

namespace bnh {

inline constexpr std::uint64_t kDefaultEnumCap = 1ull << 24;

struct SampleOutcome {
    std::vector<int> config;
    double weight = 0.0;  // product of evidence CPT entries; 0 means rejected
};

struct RejectionStats {
    long long total = 0;
    long long rejected = 0;
    double rejection_rate = 0.0;
    double pe_estimate = 0.0;     // mean sample weight, estimates Pr(e)
    double weight_variance = 0.0; // sample variance of the weights
};

enum class EvidenceMode { forward, uniform };

struct ExperimentConfig {
    int cases = 50;
    int evidence_min = 10;
    int evidence_max = 20;
    long long samples_per_case = 60000;
    std::uint64_t seed = 0;
    EvidenceMode evidence_mode = EvidenceMode::forward;
};

struct CaseResult {
    int index = 0;
    Evidence evidence;
    KTestResult ktest;
    RejectionStats stats;
    std::uint64_t seed = 0;  // sub-stream seed of this case
};

struct ExperimentReport {
    std::string network;
    std::uint64_t seed = 0;  // master seed
    std::vector<CaseResult> cases;
    double mean_rejection_rate = 0.0;    // arithmetic mean of per-case rates
    double pooled_rejection_rate = 0.0;  // total rejected / total samples
    long long total_samples = 0;
    long long total_rejected = 0;
};

struct ExactResult {
    double pe = 0.0;         // Pr(e)
    double rejection = 0.0;  // probability that a sample has weight 0
};

// One likelihood-weighting sample: evidence variables are pinned, the rest
// are drawn from their CPT rows in topological order.
SampleOutcome likelihood_sample(const BayesianNetwork& net, const Evidence& evidence, Rng& rng);

// n_samples independent draws from the stream seeded with `seed`.
// Identical seeds reproduce identical statistics bit for bit.
RejectionStats estimate_rejection_rate(const BayesianNetwork& net, const Evidence& evidence,
                                       long long n_samples, std::uint64_t seed);

// Exact Pr(e) and rejection probability by enumerating every completion of
// the evidence. Throws CapError when the completion count exceeds state_cap.
ExactResult exact_enumerate(const BayesianNetwork& net, const Evidence& evidence,
                            std::uint64_t state_cap = kDefaultEnumCap);

// Uniform-random count in [count_min, count_max] distinct variables.
// forward mode projects one unconditioned forward sample onto them
// (guarantees Pr(e) > 0); uniform mode draws each state uniformly.
Evidence select_evidence(const BayesianNetwork& net, int count_min, int count_max,
                         EvidenceMode mode, Rng& rng);

// Runs config.cases independent cases, each on its own sub-stream of
// config.seed. The report is identical for any thread count (threads = 0
// picks the hardware parallelism).
ExperimentReport run_experiment(const BayesianNetwork& net, const ExperimentConfig& config,
                                int threads = 0);

}  // namespace bnh
