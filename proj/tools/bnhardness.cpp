#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bnh/errors.hpp"
#include "bnh/ingest.hpp"
#include "bnh/ktest.hpp"
#include "bnh/model.hpp"
#include "bnh/sampler.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitCap = 4;

struct RunSpec {
    std::string command;
    std::string network_path;
    std::string evidence_path;
    std::string out_path;
    long long samples = 60000;
    int cases = 50;
    int evidence_min = 10;
    int evidence_max = 20;
    std::string evidence_mode = "forward";
    std::uint64_t seed = 0;
    double zero_epsilon = 0.0;
    std::uint64_t enum_cap = bnh::kDefaultEnumCap;
    int threads = 0;
    std::string format = "text";
};

std::string fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

std::string general6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("BNHARDNESS_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("BNHARDNESS_SEED is not an unsigned integer: '" +
                                        std::string(env) + "'");
        }
    }
    return 0;
}

std::string file_stem(const std::string& path) {
    const std::size_t slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    const std::size_t dot = name.find_last_of('.');
    if (dot != std::string::npos && dot > 0) name.resize(dot);
    return name;
}

void emit(const RunSpec& spec, const std::string& text) {
    if (spec.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(spec.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file '" + spec.out_path + "'");
    out << text;
}

bnh::BayesianNetwork load_net(const RunSpec& spec) {
    bnh::BayesianNetwork net = bnh::load_network(spec.network_path).net;
    if (spec.zero_epsilon > 0.0) {
        net = bnh::reclassify_zeros(std::move(net), spec.zero_epsilon);
        bnh::require_valid(net);
    }
    return net;
}

bnh::Evidence load_ev(const RunSpec& spec, const bnh::BayesianNetwork& net) {
    bnh::Evidence evidence;
    if (!spec.evidence_path.empty()) evidence = bnh::load_evidence(spec.evidence_path);
    bnh::validate_evidence(net, evidence);
    return evidence;
}

bnh::EvidenceMode parse_mode(const std::string& mode) {
    if (mode == "forward") return bnh::EvidenceMode::forward;
    if (mode == "uniform") return bnh::EvidenceMode::uniform;
    throw std::invalid_argument("unknown evidence mode '" + mode + "'");
}

int cmd_ktest(const RunSpec& spec) {
    const bnh::BayesianNetwork net = load_net(spec);
    const bnh::Evidence evidence = load_ev(spec, net);
    const bnh::KTestResult res = bnh::k_test(net, evidence);

    if (spec.format == "json") {
        ordered_json doc;
        doc["n"] = res.n;
        doc["m"] = res.m;
        doc["k"] = res.k;
        doc["r"] = res.r;
        doc["ratio"] = res.ratio;
        doc["class"] = bnh::to_string(res.hardness);
        doc["clauses"] = {
            {"cpt", res.zero_entries},
            {"variable", res.variable_clauses},
            {"evidence_constraints", res.evidence_constraints},
            {"evidence_units", res.evidence_unit_clauses},
        };
        emit(spec, doc.dump(2) + "\n");
    } else if (spec.format == "csv") {
        std::string out = "n,m,k,r,ratio,class,cpt_clauses,variable_clauses,evidence_constraints\n";
        out += std::to_string(res.n) + "," + std::to_string(res.m) + "," + std::to_string(res.k) +
               "," + fixed6(res.r) + "," + fixed6(res.ratio) + "," + bnh::to_string(res.hardness) +
               "," + std::to_string(res.zero_entries) + "," + std::to_string(res.variable_clauses) +
               "," + std::to_string(res.evidence_constraints) + "\n";
        emit(spec, out);
    } else {
        emit(spec, "n=" + std::to_string(res.n) + " m=" + std::to_string(res.m) +
                       " k=" + std::to_string(res.k) + " r=" + fixed6(res.r) +
                       " ratio=" + fixed6(res.ratio) +
                       " class=" + bnh::to_string(res.hardness) + "\n");
    }
    return kExitOk;
}

int cmd_tocnf(const RunSpec& spec) {
    const bnh::BayesianNetwork net = load_net(spec);
    const bnh::Evidence evidence = load_ev(spec, net);
    const auto [cnf, mapping] = bnh::encode(net, evidence);
    emit(spec, bnh::write_dimacs(cnf, mapping));
    return kExitOk;
}

int cmd_sample(const RunSpec& spec) {
    const bnh::BayesianNetwork net = load_net(spec);
    const bnh::Evidence evidence = load_ev(spec, net);
    const bnh::RejectionStats stats =
        bnh::estimate_rejection_rate(net, evidence, spec.samples, spec.seed);

    if (spec.format == "json") {
        ordered_json doc;
        doc["samples"] = stats.total;
        doc["rejected"] = stats.rejected;
        doc["rejection_rate"] = stats.rejection_rate;
        doc["pe_estimate"] = stats.pe_estimate;
        doc["weight_variance"] = stats.weight_variance;
        doc["seed"] = spec.seed;
        emit(spec, doc.dump(2) + "\n");
    } else if (spec.format == "csv") {
        std::string out = "samples,rejected,rejection_rate,pe_estimate,weight_variance,seed\n";
        out += std::to_string(stats.total) + "," + std::to_string(stats.rejected) + "," +
               fixed6(stats.rejection_rate) + "," + fixed6(stats.pe_estimate) + "," +
               general6(stats.weight_variance) + "," + std::to_string(spec.seed) + "\n";
        emit(spec, out);
    } else {
        emit(spec, "samples=" + std::to_string(stats.total) +
                       " rejected=" + std::to_string(stats.rejected) +
                       " rejection_rate=" + fixed6(stats.rejection_rate) +
                       " pe_estimate=" + fixed6(stats.pe_estimate) + "\n");
    }
    return kExitOk;
}

int cmd_experiment(const RunSpec& spec) {
    const bnh::BayesianNetwork net = load_net(spec);
    bnh::ExperimentConfig config;
    config.cases = spec.cases;
    config.evidence_min = spec.evidence_min;
    config.evidence_max = spec.evidence_max;
    config.samples_per_case = spec.samples;
    config.seed = spec.seed;
    config.evidence_mode = parse_mode(spec.evidence_mode);

    bnh::ExperimentReport report = bnh::run_experiment(net, config, spec.threads);
    report.network = file_stem(spec.network_path);

    const bnh::ReportFormat format =
        spec.format == "json" ? bnh::ReportFormat::json : bnh::ReportFormat::csv;
    emit(spec, bnh::write_report(report, format));
    return kExitOk;
}

int cmd_exact(const RunSpec& spec) {
    const bnh::BayesianNetwork net = load_net(spec);
    const bnh::Evidence evidence = load_ev(spec, net);
    const bnh::ExactResult res = bnh::exact_enumerate(net, evidence, spec.enum_cap);

    if (spec.format == "json") {
        ordered_json doc;
        doc["pe"] = res.pe;
        doc["rejection"] = res.rejection;
        emit(spec, doc.dump(2) + "\n");
    } else if (spec.format == "csv") {
        emit(spec, "pe,rejection\n" + general6(res.pe) + "," + general6(res.rejection) + "\n");
    } else {
        emit(spec, "Pr(e)=" + general6(res.pe) + " rejection=" + general6(res.rejection) + "\n");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-test hardness analysis of stochastic sampling on Bayesian networks"};
    app.require_subcommand(1);

    RunSpec spec;

    const auto add_common = [&](CLI::App* cmd, bool with_evidence) {
        cmd->add_option("network", spec.network_path, "network file (UAI Bayes format)")
            ->required();
        if (with_evidence)
            cmd->add_option("--evidence", spec.evidence_path, "evidence file (id/state pairs)");
        cmd->add_option("--out", spec.out_path, "output file (default: standard output)");
        cmd->add_option("--zero-epsilon", spec.zero_epsilon,
                        "treat entries with magnitude <= this as exact zeros")
            ->capture_default_str();
        cmd->add_option("--format", spec.format, "output format")
            ->check(CLI::IsMember({"text", "csv", "json"}))
            ->capture_default_str();
        cmd->add_option("--seed", spec.seed,
                        "RNG seed (default: $BNHARDNESS_SEED, else 0)");
    };

    CLI::App* ktest = app.add_subcommand("ktest", "clause density, width and hardness class");
    add_common(ktest, true);

    CLI::App* tocnf = app.add_subcommand("tocnf", "write the CNF encoding as DIMACS");
    add_common(tocnf, true);

    CLI::App* sample = app.add_subcommand("sample", "estimate the rejection rate by sampling");
    add_common(sample, true);
    sample->add_option("--samples", spec.samples, "number of samples")->capture_default_str();

    CLI::App* experiment =
        app.add_subcommand("experiment", "randomized multi-case rejection experiment");
    add_common(experiment, false);
    experiment->add_option("--samples", spec.samples, "samples per case")->capture_default_str();
    experiment->add_option("--cases", spec.cases, "number of cases")->capture_default_str();
    experiment->add_option("--evidence-min", spec.evidence_min, "minimum evidence size")
        ->capture_default_str();
    experiment->add_option("--evidence-max", spec.evidence_max, "maximum evidence size")
        ->capture_default_str();
    experiment->add_option("--evidence-mode", spec.evidence_mode, "evidence instantiation")
        ->check(CLI::IsMember({"forward", "uniform"}))
        ->capture_default_str();
    experiment->add_option("--threads", spec.threads, "worker threads (0 = hardware parallelism)")
        ->capture_default_str();

    CLI::App* exact = app.add_subcommand("exact", "exact Pr(e) and rejection probability");
    add_common(exact, true);
    exact->add_option("--enum-cap", spec.enum_cap, "maximum completions to enumerate")
        ->capture_default_str();

    try {
        spec.seed = default_seed();
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (spec.samples < 1)
            throw std::invalid_argument("--samples must be at least 1");
        if (ktest->parsed()) return cmd_ktest(spec);
        if (tocnf->parsed()) return cmd_tocnf(spec);
        if (sample->parsed()) return cmd_sample(spec);
        if (experiment->parsed()) return cmd_experiment(spec);
        if (exact->parsed()) return cmd_exact(spec);
        std::cerr << "error: no subcommand\n";
        return kExitUsage;
    } catch (const bnh::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const bnh::CapError& e) {
        std::cerr << "resource cap exceeded: " << e.what() << "\n";
        return kExitCap;
    } catch (const bnh::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
