#ifndef CFID_VERIFY_HPP
#define CFID_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfid/branches.hpp"
#include "cfid/model.hpp"

namespace cfid::ident {

/// Outcome of sweeping one branch against the causal-effect oracle on
/// constrained samples.
struct BranchReport {
    Branch branch;
    prob::Dims dims;
    std::uint64_t seed = 0;
    double tol = 0.0;
    int samples = 0;
    int passes = 0;
    double worst_gap = 0.0;
    /// Worst-gap model when any sample failed; re-evaluating the branch
    /// formula and oracle on it reproduces counter_* below.
    std::optional<scm::Model> counterexample;
    double counter_formula = 0.0;
    double counter_oracle = 0.0;

    bool all_passed() const { return passes == samples; }
};

/// Draws n constrained models (per-sample seeds derived from seed and the
/// sample index), compares the branch formula on each model's observed
/// summary against causal_effect_oracle(model, 1), and aggregates.
BranchReport verify_branch(const Branch& branch, prob::Dims dims, int n_samples,
                           std::uint64_t seed, double tol = 1e-9);

/// Runs verify_branch over the whole branch table of a family.
std::vector<BranchReport> verify_family(Family family, prob::Dims dims, int n_samples,
                                        std::uint64_t seed, double tol = 1e-9);

/// Human-readable deviations ledger: branch id, citation, formula/oracle
/// values, and the counterexample model as a single-line JSON document
/// that read_ledger_counterexamples can extract.
std::string deviations_ledger_text(const std::vector<BranchReport>& reports);

/// Extracts the embedded counterexample model JSON strings from a ledger
/// document, in order of appearance.
std::vector<std::string> read_ledger_counterexamples(const std::string& ledger_text);

}  // namespace cfid::ident

#endif
