#include <doctest.h>

#include "nilops/parser.hpp"
#include "support/fixtures.hpp"
#include "support/rng.hpp"

using namespace nilops;
using namespace nilops::parser;
using steenrod::AdmissibleSum;
using steenrod::Monomial;

TEST_CASE("parse_op grammar examples") {
    const auto e1 = parse_op("Sq4 Sq4");
    REQUIRE(e1.terms.size() == 1);
    CHECK(e1.terms[0].indices == std::vector<int>{4, 4});

    const auto e2 = parse_op("Sq3 Sq1 + Sq4");
    REQUIRE(e2.terms.size() == 2);
    CHECK(e2.terms[0].indices == std::vector<int>{3, 1});
    CHECK(e2.terms[1].indices == std::vector<int>{4});

    const auto unit = parse_op("1");
    REQUIRE(unit.terms.size() == 1);
    CHECK(unit.terms[0].is_unit());

    const auto mixed = parse_op("1 + Sq2");
    CHECK(mixed.terms.size() == 2);
}

TEST_CASE("parse_op rejections carry positions") {
    for (const char* bad : {"Sq0", "", "Sq", "+ Sq1", "Sq1 +", "Sq2 2", "sq1", "Sq1Sq2x", "1 1"}) {
        try {
            parse_op(bad);
            FAIL_CHECK("accepted: " << bad);
        } catch (const ParseException& e) {
            CHECK(e.error().position <= std::string(bad).size());
            CHECK(!e.error().expected.empty());
        }
    }
    // Sq1Sq2 without whitespace: "Sq1Sq2" tokenizes as Sq1 then Sq2? no:
    // the index scan stops at 'S', leaving "Sq2" as the next sqop
    const auto e = parse_op("Sq1Sq2");
    REQUIRE(e.terms.size() == 1);
    CHECK(e.terms[0].indices == std::vector<int>{1, 2});
}

TEST_CASE("print/parse round-trip on canonical sums") {
    testsupport::Rng rng(616);
    for (int d = 0; d <= 20; ++d) {
        // single monomials, exhaustive per degree
        for (const auto& m : steenrod::full_basis(d)) {
            const auto s = AdmissibleSum::of(m);
            const auto back = adem_normalize(parse_op(print_sum(s)));
            CHECK(back == s);
        }
    }
    // random mixed-degree sums; zero has no literal and prints as "0"
    for (int trial = 0; trial < 200; ++trial) {
        AdmissibleSum s;
        for (int terms = rng.range(0, 4); terms > 0; --terms) {
            const auto basis = steenrod::full_basis(rng.range(0, 20));
            s ^= AdmissibleSum::of(basis[rng.below(basis.size())]);
        }
        if (s.is_zero()) {
            CHECK(print_sum(s) == "0");
            continue;
        }
        CHECK(adem_normalize(parse_op(print_sum(s))) == s);
    }
}

TEST_CASE("parser fuzzing: rejections always carry an in-range position") {
    testsupport::Rng rng(0xF00D);
    const std::string alphabet = "Sq0123456789 +qS\t";
    for (int trial = 0; trial < 5000; ++trial) {
        std::string text;
        for (int n = rng.range(0, 24); n > 0; --n) {
            if (rng.range(0, 9) == 0)
                text.push_back(static_cast<char>(rng.below(256)));
            else
                text.push_back(alphabet[rng.below(alphabet.size())]);
        }
        try {
            (void)parse_op(text);
        } catch (const ParseException& e) {
            CHECK(e.error().position <= text.size());
        }
    }
}

TEST_CASE("module documents round-trip and validate on load") {
    const auto rp2 = fixtures::rp2_module();
    const std::string text = save_module(rp2);
    const auto loaded = load_document(text);
    REQUIRE(std::holds_alternative<modules::FiniteUnstableModule>(loaded));
    const auto& m = std::get<modules::FiniteUnstableModule>(loaded);
    CHECK(m.dim(1) == 1);
    CHECK(m.dim(2) == 1);
    CHECK(save_module(m) == text);  // load-save-load fixed point

    const auto alg = fixtures::rp3_algebra();
    const std::string atext = save_algebra(alg);
    const auto aloaded = load_document(atext);
    REQUIRE(std::holds_alternative<modules::FiniteUnstableAlgebra>(aloaded));
    CHECK(save_algebra(std::get<modules::FiniteUnstableAlgebra>(aloaded)) == atext);
}

TEST_CASE("loading an Adem-inconsistent document names the pair") {
    // Sq1 Sq1 != 0 smuggled through the document route
    const std::string doc = R"({
      "top_degree": 3,
      "dims": [0, 1, 1, 1],
      "ops": {"Sq1": [[], [[1]], [[1]], []]}
    })";
    try {
        load_document(doc);
        FAIL_CHECK("invalid document accepted");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("Sq1 Sq1") != std::string::npos);
    }
}

TEST_CASE("schema violations carry field paths") {
    try {
        load_document(R"({"top_degree": 2, "dims": [1, 0]})");
        FAIL_CHECK("accepted");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("dims") != std::string::npos);
    }
    try {
        load_document(R"({"top_degree": 1, "dims": [0, 1], "ops": {"Sq1": "x"}})");
        FAIL_CHECK("accepted");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("ops.Sq1") != std::string::npos);
    }
}
