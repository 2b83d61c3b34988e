// cfid — command-line front end for the counterfactual identification
// library: model validation, condition checks, identification, witness
// generation, and branch verification.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfid/branches.hpp"
#include "cfid/conditions.hpp"
#include "cfid/errors.hpp"
#include "cfid/model.hpp"
#include "cfid/model_io.hpp"
#include "cfid/sampler.hpp"
#include "cfid/verify.hpp"

namespace {

using nlohmann::ordered_json;
using namespace cfid;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

enum class Format { text, json };

void emit(const ordered_json& doc, Format format) {
    if (format == Format::json) {
        std::cout << doc.dump() << "\n";
    }
}

ident::AssumptionSet parse_assumptions(const std::vector<std::string>& tokens) {
    ident::AssumptionSet set;
    for (const auto& t : tokens) set.insert(ident::parse_condition(t));
    return set;
}

// ------------------------------------------------------------------ validate

int cmd_validate(const std::string& path, Format format) {
    ordered_json doc;
    doc["command"] = "validate";
    doc["file"] = path;
    try {
        const auto loaded = scm::load_model_or_summary(path);
        const bool is_model = std::holds_alternative<scm::Model>(loaded);
        const auto fam = is_model ? scm::family(std::get<scm::Model>(loaded))
                                  : std::get<scm::ObservedSummary>(loaded).family;
        const auto dims = is_model ? scm::dims(std::get<scm::Model>(loaded))
                                   : std::get<scm::ObservedSummary>(loaded).dims;
        doc["kind"] = is_model ? "model" : "summary";
        doc["family"] = scm::family_name(fam);
        doc["K"] = dims.K;
        doc["M"] = dims.M;
        doc["N"] = dims.N;
        doc["valid"] = true;
        ordered_json checks = ordered_json::array();
        checks.push_back({{"name", "shape matches dims"}, {"ok", true}});
        checks.push_back({{"name", "positivity floor 1e-09"}, {"ok", true}});
        checks.push_back({{"name", "rows normalized within 1e-09"}, {"ok", true}});
        if (is_model) {
            checks.push_back(
                {{"name", "counterfactual rows pinned to observed at X=0"}, {"ok", true}});
        }
        doc["checks"] = std::move(checks);
        emit(doc, format);
        if (format == Format::text) {
            std::cout << "file:   " << path << "\n"
                      << "kind:   " << doc["kind"].get<std::string>() << "\n"
                      << "family: " << scm::family_name(fam) << "\n"
                      << "dims:   K=" << dims.K << " M=" << dims.M << " N=" << dims.N
                      << "\n";
            for (const auto& c : doc["checks"]) {
                std::cout << "  [pass] " << c["name"].get<std::string>() << "\n";
            }
            std::cout << "valid\n";
        }
        return kExitOk;
    } catch (const ParseError& e) {
        doc["valid"] = false;
        doc["error"] = {{"path", e.path}, {"message", e.what()}};
        emit(doc, format);
        if (format == Format::text) {
            std::cout << "file:   " << path << "\ninvalid: " << e.what() << "\n";
        }
        return kExitFailure;
    }
}

// ------------------------------------------------------------------ identify

int cmd_identify(const std::string& path, const std::vector<std::string>& assume,
                 double tol, Format format) {
    const auto loaded = scm::load_model_or_summary(path);
    const auto assumptions = parse_assumptions(assume);

    const bool is_model = std::holds_alternative<scm::Model>(loaded);
    const auto summary = is_model
                             ? scm::observed_summary(std::get<scm::Model>(loaded))
                             : std::get<scm::ObservedSummary>(loaded);
    const auto result = ident::identify(summary, assumptions);

    ordered_json doc;
    doc["command"] = "identify";
    doc["file"] = path;
    doc["kind"] = is_model ? "model" : "summary";
    ordered_json alist = ordered_json::array();
    for (const auto& c : assumptions) alist.push_back(ident::to_string(c));
    doc["assumptions"] = std::move(alist);
    doc["matched"] = result.matched();
    if (result.matched()) {
        doc["branch"] = *result.branch_id;
        doc["citation"] = result.provenance;
        doc["quarantined"] = result.quarantined;
        doc["value"] = *result.value;
    } else {
        doc["provenance"] = result.provenance;
    }
    if (is_model) {
        const double oracle = scm::causal_effect_oracle(std::get<scm::Model>(loaded), 1);
        doc["oracle"] = oracle;
        if (result.matched()) {
            doc["gap"] = std::abs(*result.value - oracle);
            doc["within_tol"] = std::abs(*result.value - oracle) <= tol;
        }
    }
    emit(doc, format);
    if (format == Format::text) {
        std::cout.precision(17);
        if (result.matched()) {
            std::cout << "branch:    " << *result.branch_id << "\n"
                      << "citation:  " << result.provenance << "\n"
                      << "value:     " << *result.value << "\n";
        } else {
            std::cout << "no matching sufficient condition\n";
        }
        if (is_model) {
            std::cout << "oracle:    " << doc["oracle"].get<double>() << "\n";
            if (result.matched()) {
                std::cout << "gap:       " << doc["gap"].get<double>() << "\n";
            }
        }
    }
    return kExitOk;
}

// --------------------------------------------------------------------- check

int cmd_check(const std::string& path, double tol, const std::string& mode,
              Format format) {
    const auto loaded = scm::load_model_or_summary(path);
    if (!std::holds_alternative<scm::Model>(loaded)) {
        throw ParseError(path, "condition checks need a full model file, not a summary");
    }
    const auto& model = std::get<scm::Model>(loaded);
    const bool run_generic = mode == "generic" || mode == "both";
    const bool run_literal = mode == "literal" || mode == "both";

    ordered_json doc;
    doc["command"] = "check";
    doc["file"] = path;
    doc["tol"] = tol;
    doc["mode"] = mode;
    ordered_json rows = ordered_json::array();
    if (format == Format::text) std::cout.precision(6);
    for (const auto& cond : ident::condition_catalog(scm::dims(model))) {
        ordered_json row;
        row["condition"] = ident::to_string(cond);
        if (format == Format::text) {
            std::cout << ident::to_string(cond);
        }
        if (run_generic) {
            const auto r =
                ident::condition_holds(model, cond, tol, ident::CondMode::generic_ci);
            row["generic"] = {{"holds", r.holds}, {"violation", r.violation}};
            if (format == Format::text) {
                std::cout << "  generic: " << (r.holds ? "TRUE " : "FALSE")
                          << " (violation " << r.violation << ")";
            }
        }
        if (run_literal) {
            const auto r =
                ident::condition_holds(model, cond, tol, ident::CondMode::paper_literal);
            row["literal"] = {{"holds", r.holds}, {"violation", r.violation}};
            if (format == Format::text) {
                std::cout << "  literal: " << (r.holds ? "TRUE " : "FALSE")
                          << " (violation " << r.violation << ")";
            }
        }
        if (format == Format::text) std::cout << "\n";
        rows.push_back(std::move(row));
    }
    doc["conditions"] = std::move(rows);
    emit(doc, format);
    return kExitOk;
}

// ------------------------------------------------------------------- witness

int cmd_witness(const std::string& path, std::uint64_t seed, double min_gap,
                const std::string& out_prefix, Format format) {
    const auto loaded = scm::load_model_or_summary(path);
    const auto pair =
        std::holds_alternative<scm::Model>(loaded)
            ? scm::witness_pair(std::get<scm::Model>(loaded), seed, min_gap)
            : scm::witness_pair(std::get<scm::ObservedSummary>(loaded), seed, min_gap);

    const std::string path1 = out_prefix + "1.json";
    const std::string path2 = out_prefix + "2.json";
    scm::save_model(pair.first, path1);
    scm::save_model(pair.second, path2);

    const double e1 = scm::causal_effect_oracle(pair.first, 1);
    const double e2 = scm::causal_effect_oracle(pair.second, 1);

    ordered_json doc;
    doc["command"] = "witness";
    doc["file"] = path;
    doc["seed"] = seed;
    doc["effect_1"] = e1;
    doc["effect_2"] = e2;
    doc["observed_gap"] = pair.observed_gap;
    doc["effect_gap"] = pair.effect_gap;
    doc["model_1"] = path1;
    doc["model_2"] = path2;
    emit(doc, format);
    if (format == Format::text) {
        std::cout.precision(17);
        std::cout << "effect P0(Y=1) under model 1: " << e1 << "\n"
                  << "effect P0(Y=1) under model 2: " << e2 << "\n"
                  << "observed joint gap: " << pair.observed_gap << "\n"
                  << "effect gap:         " << pair.effect_gap << "\n"
                  << "wrote " << path1 << " and " << path2 << "\n";
    }
    return kExitOk;
}

// -------------------------------------------------------------------- verify

int cmd_verify(const std::string& family_str, std::vector<int> dims_list, int samples,
               std::uint64_t seed, double tol, const std::string& ledger_path,
               Format format) {
    if (dims_list.size() != 3) {
        throw UnknownConditionError("--dims expects K,M,N");
    }
    const scm::Family family = family_str == "A" ? scm::Family::A : scm::Family::B;
    const prob::Dims dims{dims_list[0], dims_list[1], dims_list[2]};

    const auto reports = ident::verify_family(family, dims, samples, seed, tol);

    std::ofstream ledger(ledger_path, std::ios::binary);
    if (!ledger) throw ParseError(ledger_path, "cannot open ledger file for writing");
    ledger << ident::deviations_ledger_text(reports);
    ledger.close();

    bool all_ok = true;
    ordered_json doc;
    doc["command"] = "verify";
    doc["family"] = family_str;
    doc["K"] = dims.K;
    doc["M"] = dims.M;
    doc["N"] = dims.N;
    doc["samples"] = samples;
    doc["seed"] = seed;
    doc["tol"] = tol;
    ordered_json rows = ordered_json::array();
    if (format == Format::text) std::cout.precision(6);
    for (const auto& r : reports) {
        ordered_json row;
        row["branch"] = r.branch.id;
        row["citation"] = r.branch.citation;
        row["quarantined"] = r.branch.quarantined;
        row["samples"] = r.samples;
        row["passes"] = r.passes;
        row["worst_gap"] = r.worst_gap;
        if (r.counterexample) {
            row["counterexample"] = ordered_json::parse(
                scm::model_to_json_text(*r.counterexample));
            row["formula_value"] = r.counter_formula;
            row["oracle_value"] = r.counter_oracle;
        }
        rows.push_back(std::move(row));
        if (!r.branch.quarantined && !r.all_passed()) all_ok = false;
        if (format == Format::text) {
            std::cout << (r.all_passed() ? "[pass] " : "[FAIL] ") << r.branch.id
                      << (r.branch.quarantined ? " [quarantined]" : "") << "  passes "
                      << r.passes << "/" << r.samples << "  worst gap " << r.worst_gap
                      << "  (" << r.branch.citation << ")\n";
        }
    }
    doc["branches"] = std::move(rows);
    doc["all_passed"] = all_ok;
    doc["ledger"] = ledger_path;
    emit(doc, format);
    if (format == Format::text) {
        std::cout << (all_ok ? "all non-quarantined branches pass"
                             : "verification FAILED on a non-quarantined branch")
                  << "; ledger written to " << ledger_path << "\n";
    }
    return all_ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "cfid — identification of the causal effect P0(Y=1) in three-variable\n"
        "discrete counterfactual models, with oracle-verified branch tables.\n\n"
        "Condition grammar for --assume: X_|_Y, X_|_Y|Z, X_|_Y|Z=j, Y_|_Z,\n"
        "Y_|_Z|X=i, X_|_Z, X_|_Z|Y=k"};
    app.require_subcommand(1);

    std::string format_str = "text";
    app.add_option("--format", format_str, "Output format: text|json")
        ->check(CLI::IsMember({"text", "json"}));

    std::string path;
    std::vector<std::string> assume;
    double tol = 1e-9;
    std::string mode = "both";
    std::uint64_t seed = 0;
    double min_gap = scm::kDefaultWitnessMinGap;
    std::string out_prefix = "witness_";
    std::string family_str = "A";
    std::vector<int> dims_list{3, 3, 3};
    int samples = 1000;
    std::string ledger_path = "deviations.md";

    auto* validate = app.add_subcommand("validate", "Validate a model or summary file");
    validate->add_option("file", path, "Model or summary JSON file")->required();

    auto* identify = app.add_subcommand(
        "identify", "Identify P0(Y=1) from a summary (or model) under assumptions");
    identify->add_option("file", path, "Model or summary JSON file")->required();
    identify->add_option("--assume", assume, "Assumed condition (repeatable)");
    identify->add_option("--tol", tol, "Tolerance for the printed formula/oracle gap");

    auto* check = app.add_subcommand("check",
                                     "Evaluate every catalog condition on a model");
    check->add_option("file", path, "Model JSON file")->required();
    check->add_option("--tol", tol, "Independence tolerance");
    check->add_option("--mode", mode, "generic|literal|both")
        ->check(CLI::IsMember({"generic", "literal", "both"}));

    auto* witness = app.add_subcommand(
        "witness", "Build two models with identical observed joints but different effects");
    witness->add_option("file", path, "Base model or summary JSON file")->required();
    witness->add_option("--seed", seed, "Seed for the completion sampler");
    witness->add_option("--min-gap", min_gap, "Minimum effect gap to certify");
    witness->add_option("--out-prefix", out_prefix, "Prefix for the two output files");

    auto* verify = app.add_subcommand(
        "verify", "Sweep every branch of a family against the intervention oracle");
    verify->add_option("--family", family_str, "A|B")
        ->check(CLI::IsMember({"A", "B"}));
    verify->add_option("--dims", dims_list, "K,M,N")->delimiter(',');
    verify->add_option("--samples", samples, "Constrained samples per branch")
        ->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "Sweep seed");
    verify->add_option("--tol", tol, "Formula/oracle gap tolerance");
    verify->add_option("--ledger", ledger_path, "Deviations ledger output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const Format format = format_str == "json" ? Format::json : Format::text;
    try {
        if (validate->parsed()) return cmd_validate(path, format);
        if (identify->parsed()) return cmd_identify(path, assume, tol, format);
        if (check->parsed()) return cmd_check(path, tol, mode, format);
        if (witness->parsed()) return cmd_witness(path, seed, min_gap, out_prefix, format);
        if (verify->parsed()) {
            return cmd_verify(family_str, dims_list, samples, seed, tol, ledger_path,
                              format);
        }
    } catch (const UnknownConditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
