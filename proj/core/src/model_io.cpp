#include "cfid/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cfid::scm {

namespace {

using nlohmann::ordered_json;

std::string join_path(const std::string& base, const std::string& leaf) {
    return base + "/" + leaf;
}

const ordered_json& require_field(const ordered_json& obj, const std::string& key,
                                  const std::string& base) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ParseError(join_path(base, key), "missing required field");
    }
    return obj.at(key);
}

int require_int(const ordered_json& obj, const std::string& key, const std::string& base) {
    const auto& v = require_field(obj, key, base);
    if (!v.is_number_integer()) {
        throw ParseError(join_path(base, key), "expected an integer");
    }
    return v.get<int>();
}

std::vector<double> number_array(const ordered_json& v, const std::string& path,
                                 int want_len) {
    if (!v.is_array() || static_cast<int>(v.size()) != want_len) {
        throw ParseError(path, "expected an array of length " + std::to_string(want_len));
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
            throw ParseError(path + "/" + std::to_string(i), "expected a number");
        }
        out.push_back(v[i].get<double>());
    }
    return out;
}

prob::ProbVector prob_vector_at(const ordered_json& v, const std::string& path,
                                int want_len) {
    auto entries = number_array(v, path, want_len);
    try {
        return prob::ProbVector::validated(std::move(entries));
    } catch (const Error& e) {
        throw ParseError(path, e.what());
    }
}

// [K][N][M] nested outcome table
prob::CondTable outcome_from_json(const ordered_json& v, const std::string& path,
                                  const prob::Dims& d) {
    if (!v.is_array() || static_cast<int>(v.size()) != d.K) {
        throw ParseError(path, "expected K=" + std::to_string(d.K) + " row groups");
    }
    std::vector<prob::ProbVector> rows;
    rows.reserve(static_cast<std::size_t>(d.K) * d.N);
    for (int x = 0; x < d.K; ++x) {
        const auto& group = v[static_cast<std::size_t>(x)];
        const std::string gpath = path + "/" + std::to_string(x);
        if (!group.is_array() || static_cast<int>(group.size()) != d.N) {
            throw ParseError(gpath, "expected N=" + std::to_string(d.N) + " rows");
        }
        for (int z = 0; z < d.N; ++z) {
            rows.push_back(prob_vector_at(group[static_cast<std::size_t>(z)],
                                          gpath + "/" + std::to_string(z), d.M));
        }
    }
    return prob::CondTable::validated({d.K, d.N}, d.M, std::move(rows));
}

// [K][N] nested mediator table
prob::CondTable mediator_from_json(const ordered_json& v, const std::string& path,
                                   const prob::Dims& d) {
    if (!v.is_array() || static_cast<int>(v.size()) != d.K) {
        throw ParseError(path, "expected K=" + std::to_string(d.K) + " rows");
    }
    std::vector<prob::ProbVector> rows;
    rows.reserve(static_cast<std::size_t>(d.K));
    for (int x = 0; x < d.K; ++x) {
        rows.push_back(prob_vector_at(v[static_cast<std::size_t>(x)],
                                      path + "/" + std::to_string(x), d.N));
    }
    return prob::CondTable::validated({d.K}, d.N, std::move(rows));
}

ordered_json to_json(const prob::ProbVector& v) {
    ordered_json arr = ordered_json::array();
    for (double x : v.entries()) arr.push_back(x);
    return arr;
}

ordered_json outcome_to_json(const prob::CondTable& t, const prob::Dims& d) {
    ordered_json groups = ordered_json::array();
    for (int x = 0; x < d.K; ++x) {
        ordered_json group = ordered_json::array();
        for (int z = 0; z < d.N; ++z) group.push_back(to_json(t.at({x, z})));
        groups.push_back(std::move(group));
    }
    return groups;
}

ordered_json mediator_to_json(const prob::CondTable& t, const prob::Dims& d) {
    ordered_json rows = ordered_json::array();
    for (int x = 0; x < d.K; ++x) rows.push_back(to_json(t.row(x)));
    return rows;
}

ordered_json parse_document(const std::string& text) {
    ordered_json doc = ordered_json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw ParseError("", "not valid JSON");
    if (!doc.is_object()) throw ParseError("", "expected a JSON object");
    return doc;
}

Family family_of(const ordered_json& doc) {
    const auto& fam = require_field(doc, "family", "");
    if (fam.is_string()) {
        const auto s = fam.get<std::string>();
        if (s == "A") return Family::A;
        if (s == "B") return Family::B;
    }
    throw ParseError("/family", "expected \"A\" or \"B\"");
}

prob::Dims dims_of(const ordered_json& doc) {
    const prob::Dims d{require_int(doc, "K", ""), require_int(doc, "M", ""),
                       require_int(doc, "N", "")};
    if (d.K < 2) throw ParseError("/K", "must be >= 2");
    if (d.M < 2) throw ParseError("/M", "must be >= 2");
    if (d.N < 2) throw ParseError("/N", "must be >= 2");
    return d;
}

Model model_from_json(const ordered_json& doc) {
    const Family fam = family_of(doc);
    const prob::Dims d = dims_of(doc);
    auto x_dist = prob_vector_at(require_field(doc, "a", ""), "/a", d.K);
    auto outcome_obs = outcome_from_json(require_field(doc, "b", ""), "/b", d);
    auto outcome_cf = outcome_from_json(require_field(doc, "u", ""), "/u", d);

    // pinning check here so the error cites the path
    for (int j = 0; j < d.N; ++j) {
        if (!(outcome_cf.at({0, j}) == outcome_obs.at({0, j}))) {
            throw ParseError("/u/0/" + std::to_string(j),
                             "counterfactual row at X=0 must equal /b/0/" +
                                 std::to_string(j) + " exactly");
        }
    }

    if (fam == Family::A) {
        auto z_dist = prob_vector_at(require_field(doc, "c", ""), "/c", d.N);
        try {
            return ModelA::validated(d, std::move(x_dist), std::move(z_dist),
                                     std::move(outcome_obs), std::move(outcome_cf));
        } catch (const Error& e) {
            throw ParseError("", e.what());
        }
    }
    auto z_obs = mediator_from_json(require_field(doc, "d", ""), "/d", d);
    auto z_cf = mediator_from_json(require_field(doc, "c", ""), "/c", d);
    if (!(z_cf.row(0) == z_obs.row(0))) {
        throw ParseError("/c/0", "counterfactual mediator row at X=0 must equal /d/0 exactly");
    }
    try {
        return ModelB::validated(d, std::move(x_dist), std::move(z_obs), std::move(z_cf),
                                 std::move(outcome_obs), std::move(outcome_cf));
    } catch (const Error& e) {
        throw ParseError("", e.what());
    }
}

ObservedSummary summary_from_json(const ordered_json& doc) {
    const Family fam = family_of(doc);
    const prob::Dims d = dims_of(doc);
    auto x_dist = prob_vector_at(require_field(doc, "a", ""), "/a", d.K);
    auto z0 = prob_vector_at(require_field(doc, "c", ""), "/c", d.N);
    const auto& block = require_field(doc, "b0", "");
    if (!block.is_array() || static_cast<int>(block.size()) != d.N) {
        throw ParseError("/b0", "expected N=" + std::to_string(d.N) + " rows");
    }
    std::vector<prob::ProbVector> rows;
    rows.reserve(static_cast<std::size_t>(d.N));
    for (int z = 0; z < d.N; ++z) {
        rows.push_back(prob_vector_at(block[static_cast<std::size_t>(z)],
                                      "/b0/" + std::to_string(z), d.M));
    }
    try {
        return ObservedSummary::validated(fam, d, std::move(x_dist), std::move(z0),
                                          std::move(rows));
    } catch (const Error& e) {
        throw ParseError("", e.what());
    }
}

}  // namespace

Model model_from_json_text(const std::string& text) {
    return model_from_json(parse_document(text));
}

ObservedSummary summary_from_json_text(const std::string& text) {
    return summary_from_json(parse_document(text));
}

ModelOrSummary model_or_summary_from_json_text(const std::string& text) {
    const ordered_json doc = parse_document(text);
    if (doc.contains("b0")) return summary_from_json(doc);
    return model_from_json(doc);
}

std::string model_to_json_text(const Model& m, int indent) {
    ordered_json doc;
    const prob::Dims d = dims(m);
    doc["family"] = family_name(family(m));
    doc["K"] = d.K;
    doc["M"] = d.M;
    doc["N"] = d.N;
    if (const auto* ma = std::get_if<ModelA>(&m)) {
        doc["a"] = to_json(ma->x_dist());
        doc["c"] = to_json(ma->z_dist());
        doc["b"] = outcome_to_json(ma->outcome_obs(), d);
        doc["u"] = outcome_to_json(ma->outcome_cf(), d);
    } else {
        const auto& mb = std::get<ModelB>(m);
        doc["a"] = to_json(mb.x_dist());
        doc["c"] = mediator_to_json(mb.z_given_x_cf(), d);
        doc["d"] = mediator_to_json(mb.z_given_x_obs(), d);
        doc["b"] = outcome_to_json(mb.outcome_obs(), d);
        doc["u"] = outcome_to_json(mb.outcome_cf(), d);
    }
    return doc.dump(indent);
}

std::string summary_to_json_text(const ObservedSummary& s, int indent) {
    ordered_json doc;
    doc["family"] = family_name(s.family);
    doc["K"] = s.dims.K;
    doc["M"] = s.dims.M;
    doc["N"] = s.dims.N;
    doc["a"] = to_json(s.x_dist);
    doc["c"] = to_json(s.z0);
    ordered_json block = ordered_json::array();
    for (const auto& row : s.outcome_x0) block.push_back(to_json(row));
    doc["b0"] = std::move(block);
    return doc.dump(indent);
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

Model load_model(const std::string& path) {
    try {
        return model_from_json_text(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + (e.path.empty() ? "" : ":" + e.path), e.what());
    }
}

ModelOrSummary load_model_or_summary(const std::string& path) {
    try {
        return model_or_summary_from_json_text(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + (e.path.empty() ? "" : ":" + e.path), e.what());
    }
}

void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path, "cannot open file for writing");
    out << model_to_json_text(m, 1) << "\n";
}

}  // namespace cfid::scm
