#ifndef CFID_TEST_SUPPORT_HPP
#define CFID_TEST_SUPPORT_HPP

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "cfid/model.hpp"
#include "cfid/prob.hpp"
#include "cfid/rng.hpp"

namespace cfid_test {

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline cfid::prob::ProbVector pv(std::vector<double> v) {
    return cfid::prob::ProbVector::validated(std::move(v));
}

inline cfid::prob::CondTable outcome_rows(
    cfid::prob::Dims d, const std::vector<std::vector<double>>& rows) {
    std::vector<cfid::prob::ProbVector> entries;
    for (const auto& r : rows) entries.push_back(pv(r));
    return cfid::prob::CondTable::validated({d.K, d.N}, d.M, std::move(entries));
}

inline cfid::prob::CondTable mediator_rows(
    cfid::prob::Dims d, const std::vector<std::vector<double>>& rows) {
    std::vector<cfid::prob::ProbVector> entries;
    for (const auto& r : rows) entries.push_back(pv(r));
    return cfid::prob::CondTable::validated({d.K}, d.N, std::move(entries));
}

// Uniform family-A model at the given dims.
inline cfid::scm::ModelA uniform_model_a(cfid::prob::Dims d) {
    std::vector<std::vector<double>> rows(
        static_cast<std::size_t>(d.K * d.N),
        std::vector<double>(static_cast<std::size_t>(d.M), 1.0 / d.M));
    return cfid::scm::ModelA::validated(
        d, pv(std::vector<double>(static_cast<std::size_t>(d.K), 1.0 / d.K)),
        pv(std::vector<double>(static_cast<std::size_t>(d.N), 1.0 / d.N)),
        outcome_rows(d, rows), outcome_rows(d, rows));
}

// The worked 3x3x3 model: a = c = (.5,.3,.2), b0^1 = (.2,.3,.5),
// u^1 rows at X=1 constant 0.1 and at X=2 constant 0.4; oracle 0.255.
inline cfid::scm::ModelA worked_model_a() {
    const cfid::prob::Dims d{3, 3, 3};
    const std::vector<std::vector<double>> b = {
        {0.5, 0.2, 0.3}, {0.4, 0.3, 0.3}, {0.2, 0.5, 0.3},
        {0.3, 0.4, 0.3}, {0.3, 0.4, 0.3}, {0.3, 0.4, 0.3},
        {0.25, 0.35, 0.4}, {0.25, 0.35, 0.4}, {0.25, 0.35, 0.4}};
    const std::vector<std::vector<double>> u = {
        {0.5, 0.2, 0.3}, {0.4, 0.3, 0.3}, {0.2, 0.5, 0.3},
        {0.5, 0.1, 0.4}, {0.5, 0.1, 0.4}, {0.5, 0.1, 0.4},
        {0.3, 0.4, 0.3}, {0.3, 0.4, 0.3}, {0.3, 0.4, 0.3}};
    return cfid::scm::ModelA::validated(d, pv({0.5, 0.3, 0.2}), pv({0.5, 0.3, 0.2}),
                                        outcome_rows(d, b), outcome_rows(d, u));
}

// Random positive joint cells (not from any model), summing to 1.
inline cfid::prob::JointTable random_joint(cfid::prob::Dims d, std::uint64_t seed) {
    cfid::Rng rng(seed);
    auto cells = rng.simplex(d.K * d.M * d.N, 1e-4);
    return cfid::prob::JointTable::validated_flat(std::move(cells), d);
}

struct CliResult {
    int exit_code;
    std::string output;
};

// Runs the CLI binary with the given argument string, merging stderr.
inline CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(CFID_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, "popen failed"};
    while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

inline std::string fixture(const std::string& name) {
    return std::string(CFID_FIXTURES_DIR) + "/" + name;
}

}  // namespace cfid_test

#endif
