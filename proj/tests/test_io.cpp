#include <doctest.h>

#include <string>

#include "cfid/model_io.hpp"
#include "cfid/sampler.hpp"
#include "test_support.hpp"

using namespace cfid;
using namespace cfid::scm;
using cfid_test::close;

TEST_CASE("model JSON round-trips bit-exactly") {
    for (const Family fam : {Family::A, Family::B}) {
        const auto m = sample_model(fam, {3, 2, 3}, {}, 2024);
        const auto text = model_to_json_text(m);
        const auto reread = model_from_json_text(text);
        CHECK(model_to_json_text(reread) == text);
        CHECK(causal_effect_oracle(reread, 1) == causal_effect_oracle(m, 1));
    }
}

TEST_CASE("summary JSON round-trips") {
    const auto m = sample_model(Family::B, {3, 3, 3}, {}, 2025);
    const auto s = observed_summary(m);
    const auto text = summary_to_json_text(s);
    const auto reread = summary_from_json_text(text);
    CHECK(summary_to_json_text(reread) == text);
}

TEST_CASE("loader distinguishes models from summaries") {
    const auto m = sample_model(Family::A, {2, 2, 2}, {}, 9);
    const auto as_model = model_or_summary_from_json_text(model_to_json_text(m));
    CHECK(std::holds_alternative<Model>(as_model));
    const auto as_summary =
        model_or_summary_from_json_text(summary_to_json_text(observed_summary(m)));
    CHECK(std::holds_alternative<ObservedSummary>(as_summary));
}

namespace {

void expect_parse_error(const std::string& text, const std::string& path_fragment) {
    try {
        model_from_json_text(text);
        FAIL("expected ParseError for path " << path_fragment);
    } catch (const ParseError& e) {
        CHECK(e.path.find(path_fragment) != std::string::npos);
    }
}

}  // namespace

TEST_CASE("parse errors cite the offending path") {
    expect_parse_error("[]", "");
    expect_parse_error(R"({"family":"C"})", "/family");
    expect_parse_error(R"({"family":"A","K":1,"M":2,"N":2})", "/K");
    expect_parse_error(
        R"({"family":"A","K":2,"M":2,"N":2,"a":[0.5,0.6],"c":[0.5,0.5],
            "b":[[[0.5,0.5],[0.5,0.5]],[[0.5,0.5],[0.5,0.5]]],
            "u":[[[0.5,0.5],[0.5,0.5]],[[0.5,0.5],[0.5,0.5]]]})",
        "/a");
    expect_parse_error(
        R"({"family":"A","K":2,"M":2,"N":2,"a":[0.5,0.5],"c":[0.5,0.5],
            "b":[[[0.5,0.5],[0.5,0.5]],[[0.5,0.5],[0.5,0.5]]],
            "u":[[[0.4,0.6],[0.5,0.5]],[[0.5,0.5],[0.5,0.5]]]})",
        "/u/0");
    expect_parse_error(
        R"({"family":"A","K":2,"M":2,"N":2,"a":[0.5,0.5],"c":[0.5,0.5],
            "b":"nope","u":[[[0.5,0.5],[0.5,0.5]],[[0.5,0.5],[0.5,0.5]]]})",
        "/b");
    expect_parse_error(
        R"({"family":"B","K":2,"M":2,"N":2,"a":[0.5,0.5],
            "c":[[0.4,0.6],[0.5,0.5]],"d":[[0.5,0.5],[0.5,0.5]],
            "b":[[[0.5,0.5],[0.5,0.5]],[[0.5,0.5],[0.5,0.5]]],
            "u":[[[0.5,0.5],[0.5,0.5]],[[0.5,0.5],[0.5,0.5]]]})",
        "/c/0");
}

TEST_CASE("file loading reports missing files") {
    CHECK_THROWS_AS(load_model("/nonexistent/path.json"), ParseError);
}
