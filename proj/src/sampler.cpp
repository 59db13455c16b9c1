#include "bnh/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "bnh/errors.hpp"

namespace bnh {

namespace {

struct SamplePlan {
    const BayesianNetwork* net = nullptr;
    std::vector<int> order;  // topological
    std::vector<int> fixed;  // observed state, or -1 to sample
};

SamplePlan make_plan(const BayesianNetwork& net, const Evidence& evidence) {
    validate_evidence(net, evidence);
    SamplePlan plan;
    plan.net = &net;
    plan.order = topological_order(net);
    plan.fixed.assign(net.variables.size(), -1);
    for (const auto& [var, state] : evidence) plan.fixed[var] = state;
    return plan;
}

// One likelihood-weighting pass. Free variables are drawn by inverse CDF
// over their CPT row; any remainder left by a row summing slightly below 1
// is absorbed into the last state with nonzero probability, so states with
// probability 0 are never drawn.
double draw_into(const SamplePlan& plan, Rng& rng, std::vector<int>& config) {
    const BayesianNetwork& net = *plan.net;
    double weight = 1.0;
    for (int v : plan.order) {
        const Cpt& cpt = net.cpts[v];
        const int card = net.cardinality(v);
        const std::size_t row = net.cpt_row(cpt, config);
        const double* p = cpt.table.data() + row * static_cast<std::size_t>(card);
        if (plan.fixed[v] >= 0) {
            config[v] = plan.fixed[v];
            weight *= p[plan.fixed[v]];
        } else {
            const double u = rng.next_double();
            double acc = 0.0;
            int pick = -1;
            int last_nonzero = 0;
            for (int s = 0; s < card; ++s) {
                if (p[s] > 0.0) last_nonzero = s;
                acc += p[s];
                if (u < acc) { pick = s; break; }
            }
            config[v] = pick >= 0 ? pick : last_nonzero;
        }
    }
    return weight;
}

std::uint64_t free_state_count(const BayesianNetwork& net, const SamplePlan& plan) {
    std::uint64_t count = 1;
    constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();
    for (int v = 0; v < net.num_variables(); ++v) {
        if (plan.fixed[v] >= 0) continue;
        const std::uint64_t card = static_cast<std::uint64_t>(net.cardinality(v));
        if (count > kSaturated / card) return kSaturated;
        count *= card;
    }
    return count;
}

}  // namespace

SampleOutcome likelihood_sample(const BayesianNetwork& net, const Evidence& evidence, Rng& rng) {
    const SamplePlan plan = make_plan(net, evidence);
    SampleOutcome out;
    out.config.assign(net.variables.size(), 0);
    out.weight = draw_into(plan, rng, out.config);
    return out;
}

RejectionStats estimate_rejection_rate(const BayesianNetwork& net, const Evidence& evidence,
                                       long long n_samples, std::uint64_t seed) {
    if (n_samples < 1)
        throw std::invalid_argument("sample count must be at least 1, got " +
                                    std::to_string(n_samples));
    const SamplePlan plan = make_plan(net, evidence);
    Rng rng(seed);
    std::vector<int> config(net.variables.size(), 0);

    long long rejected = 0;
    double sum_w = 0.0;
    double sum_w2 = 0.0;
    for (long long i = 0; i < n_samples; ++i) {
        const double w = draw_into(plan, rng, config);
        if (w == 0.0) ++rejected;
        sum_w += w;
        sum_w2 += w * w;
    }

    RejectionStats stats;
    stats.total = n_samples;
    stats.rejected = rejected;
    stats.rejection_rate = static_cast<double>(rejected) / static_cast<double>(n_samples);
    stats.pe_estimate = sum_w / static_cast<double>(n_samples);
    stats.weight_variance =
        n_samples >= 2
            ? std::max(0.0, (sum_w2 - sum_w * sum_w / static_cast<double>(n_samples)) /
                                static_cast<double>(n_samples - 1))
            : 0.0;
    return stats;
}

ExactResult exact_enumerate(const BayesianNetwork& net, const Evidence& evidence,
                            std::uint64_t state_cap) {
    const SamplePlan plan = make_plan(net, evidence);
    const std::uint64_t completions = free_state_count(net, plan);
    if (completions > state_cap)
        throw CapError("state space too large: " + std::to_string(completions) +
                           " completions of the evidence exceed the cap of " +
                           std::to_string(state_cap),
                       completions);

    std::vector<int> free_vars;
    for (int v = 0; v < net.num_variables(); ++v)
        if (plan.fixed[v] < 0 && net.cardinality(v) > 1) free_vars.push_back(v);

    std::vector<int> config(net.variables.size(), 0);
    for (int v = 0; v < net.num_variables(); ++v)
        if (plan.fixed[v] >= 0) config[v] = plan.fixed[v];

    ExactResult out;
    for (;;) {
        double proposal = 1.0;
        double weight = 1.0;
        bool weight_zero = false;
        for (int v = 0; v < net.num_variables(); ++v) {
            const double factor = net.cpt_entry(net.cpts[v], config);
            if (plan.fixed[v] >= 0) {
                if (factor == 0.0) weight_zero = true;
                weight *= factor;
            } else {
                proposal *= factor;
            }
        }
        if (weight_zero)
            out.rejection += proposal;
        else
            out.pe += proposal * weight;

        // odometer over the free variables, first index fastest
        std::size_t pos = 0;
        while (pos < free_vars.size()) {
            const int v = free_vars[pos];
            if (++config[v] < net.cardinality(v)) break;
            config[v] = 0;
            ++pos;
        }
        if (pos == free_vars.size()) break;
    }
    return out;
}

Evidence select_evidence(const BayesianNetwork& net, int count_min, int count_max,
                         EvidenceMode mode, Rng& rng) {
    const int n = net.num_variables();
    if (count_min < 1 || count_min > count_max || count_max > n)
        throw std::invalid_argument("infeasible evidence range [" + std::to_string(count_min) +
                                    ", " + std::to_string(count_max) + "] for a network of " +
                                    std::to_string(n) + " variables");
    const int count =
        count_min + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(count_max - count_min + 1)));

    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    for (int i = 0; i < count; ++i) {
        const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(ids[i], ids[j]);
    }

    Evidence evidence;
    if (mode == EvidenceMode::forward) {
        const SamplePlan plan = make_plan(net, Evidence{});
        std::vector<int> config(net.variables.size(), 0);
        draw_into(plan, rng, config);
        for (int i = 0; i < count; ++i) evidence[ids[i]] = config[ids[i]];
    } else {
        for (int i = 0; i < count; ++i)
            evidence[ids[i]] =
                static_cast<int>(rng.next_below(static_cast<std::uint64_t>(net.cardinality(ids[i]))));
    }
    return evidence;
}

ExperimentReport run_experiment(const BayesianNetwork& net, const ExperimentConfig& config,
                                int threads) {
    if (config.cases < 1)
        throw std::invalid_argument("experiment needs at least 1 case, got " +
                                    std::to_string(config.cases));
    if (config.samples_per_case < 1)
        throw std::invalid_argument("experiment needs at least 1 sample per case, got " +
                                    std::to_string(config.samples_per_case));
    if (config.evidence_min < 1 || config.evidence_min > config.evidence_max ||
        config.evidence_max > net.num_variables())
        throw std::invalid_argument("infeasible evidence range [" +
                                    std::to_string(config.evidence_min) + ", " +
                                    std::to_string(config.evidence_max) + "] for a network of " +
                                    std::to_string(net.num_variables()) + " variables");

    ExperimentReport report;
    report.seed = config.seed;
    report.cases.resize(config.cases);

    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, config.cases));

    std::atomic<int> next_case{0};
    std::vector<std::exception_ptr> errors(config.cases);

    const auto run_case = [&](int i) {
        const std::uint64_t case_seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
        Rng selection_rng(derive_seed(case_seed, 0));
        CaseResult& row = report.cases[i];
        row.index = i;
        row.seed = case_seed;
        row.evidence = select_evidence(net, config.evidence_min, config.evidence_max,
                                       config.evidence_mode, selection_rng);
        row.ktest = k_test(net, row.evidence);
        row.stats = estimate_rejection_rate(net, row.evidence, config.samples_per_case,
                                            derive_seed(case_seed, 1));
    };

    const auto worker = [&] {
        for (;;) {
            const int i = next_case.fetch_add(1);
            if (i >= config.cases) return;
            try {
                run_case(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (int i = 0; i < config.cases; ++i) {
        if (!errors[i]) continue;
        const std::string where = "case " + std::to_string(i) + ": ";
        try {
            std::rethrow_exception(errors[i]);
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        } catch (const CapError& e) {
            throw CapError(where + e.what(), e.size());
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(where + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error(where + e.what());
        }
    }

    double rate_sum = 0.0;
    for (const CaseResult& row : report.cases) {
        rate_sum += row.stats.rejection_rate;
        report.total_samples += row.stats.total;
        report.total_rejected += row.stats.rejected;
    }
    report.mean_rejection_rate = rate_sum / static_cast<double>(config.cases);
    report.pooled_rejection_rate =
        static_cast<double>(report.total_rejected) / static_cast<double>(report.total_samples);
    return report;
}

}  // namespace bnh
