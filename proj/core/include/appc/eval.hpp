#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "appc/domains.hpp"
#include "appc/synthesis.hpp"

namespace appc {

struct EvalRecord {
    std::string task;
    std::string domain;
    ApperceptionTask::Kind kind = ApperceptionTask::Prediction;
    std::string system;
    std::string status;
    bool all_correct = false;
    std::size_t atoms_correct = 0;
    std::size_t atoms_total = 0;
    std::optional<CostBreakdown> cost;
    std::int64_t wall_ms = 0;
    std::size_t memory_kb = 0;  // coarse process peak
};

// Re-hides a task's ground truth: prediction hides the final step, retrodiction
// the first, imputation a seeded random subset of the same cardinality as the
// final step.
ApperceptionTask make_task(const ApperceptionTask& base, ApperceptionTask::Kind kind,
                           std::uint64_t seed);

// Fraction of records with every hidden atom correct.
double accuracy(const std::vector<EvalRecord>& records);

// κ = (a − r)/(1 − r); rejects r outside [0, 1).
double kappa(double a, double r);

// χ² = (b − c)²/(b + c) over inaccuracy counts; rejects b = c = 0.
double mcnemar(double b, double c);

// Per-sensor majority value over the visible steps (ties resolved by canonical
// order); returns the predicted atom set, valid at any time.
std::vector<Atom> baseline_constant(const ApperceptionTask& task);

// Nearest visible state (the penultimate step, for prediction tasks).
std::vector<Atom> baseline_inertia(const ApperceptionTask& task, std::size_t time);

// Randomly mislabels a fraction of the visible atoms (seeded).
ApperceptionTask perturb_task(const ApperceptionTask& task, double fraction, std::uint64_t seed);

struct SuiteConfig {
    std::vector<std::string> systems{"engine", "constant", "inertia"};
    SolveOptions solve;
    std::size_t max_auto_templates = 48;
    int threads = 1;
    std::uint64_t seed = 0;
    std::optional<ApperceptionTask::Kind> force_kind;
    std::vector<double> mislabel_fractions;  // extra engine runs on perturbed copies
    std::string template_dir;                // base for relative template references
};

struct DomainSummary {
    std::string domain;
    std::string system;
    std::size_t tasks = 0;
    double accuracy = 0;
    double kappa = 0;
    std::map<std::string, double> mcnemar_vs;  // other system -> statistic
};

struct SuiteResult {
    std::vector<EvalRecord> records;
    std::vector<DomainSummary> summaries;
};

SuiteResult run_suite(const std::vector<ApperceptionTask>& tasks, const SuiteConfig& config);

std::string records_csv(const std::vector<EvalRecord>& records);
std::string summaries_csv(const std::vector<DomainSummary>& summaries);

// Paper-reported chance-agreement rates for the five domains ("" when unknown).
double domain_random_agreement(const std::string& domain);
std::string domain_of_task_name(const std::string& name);

}  // namespace appc
