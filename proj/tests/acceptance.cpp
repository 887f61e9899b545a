// Acceptance suite: every criterion below prints one PASS/FAIL line and the
// binary exits nonzero when any of them fails. Run through ctest or as
//   acceptance_suite --cli <path to the nilops binary>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nilops/laws.hpp"
#include "nilops/nilfilt.hpp"
#include "nilops/parser.hpp"
#include "nilops/steenrod.hpp"
#include "nilops/tor.hpp"
#include "support/eval_oracle.hpp"
#include "support/fixtures.hpp"

using namespace nilops;
using steenrod::AdmissibleSum;
using steenrod::Monomial;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what, const std::string& detail = "") {
    std::printf("%s criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. rewriting engine vs the faithful evaluation oracle, exhaustive a+b <= 24
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    long long pairs = 0;
    for (int a = 1; a <= 23; ++a) {
        for (int b = 1; a + b <= 24; ++b) {
            const int n = a + b;
            const AdmissibleSum nf = steenrod::adem_normalize(Monomial({a, b}));
            if (!oracle::word_matches_sum_on_top_class({a, b}, nf, n)) {
                report(1, false, "Adem engine vs evaluation oracle",
                       "mismatch at Sq" + std::to_string(a) + " Sq" + std::to_string(b));
                return;
            }
            ++pairs;
        }
    }
    const double dt = seconds_since(t0);
    report(1, dt < 120.0, "Adem engine vs evaluation oracle",
           std::to_string(pairs) + " pairs with a+b <= 24, exhaustive, " + std::to_string(dt) +
               "s");
}

// 2. conjugation is an involutive anti-homomorphism through degree 20
void criterion_2() {
    for (int d = 0; d <= 20; ++d)
        for (const auto& m : steenrod::full_basis(d)) {
            const auto s = AdmissibleSum::of(m);
            if (!(steenrod::conjugate(steenrod::conjugate(s)) == s)) {
                report(2, false, "conjugation involution", "chi^2 != id at " + m.to_string());
                return;
            }
        }
    long long pairs = 0;
    for (int d1 = 0; d1 <= 20; ++d1)
        for (int d2 = 0; d1 + d2 <= 20; ++d2)
            for (const auto& a : steenrod::full_basis(d1))
                for (const auto& b : steenrod::full_basis(d2)) {
                    const auto sa = AdmissibleSum::of(a), sb = AdmissibleSum::of(b);
                    if (!(steenrod::conjugate(steenrod::multiply(sa, sb)) ==
                          steenrod::multiply(steenrod::conjugate(sb), steenrod::conjugate(sa)))) {
                        report(2, false, "conjugation anti-homomorphism",
                               a.to_string() + " * " + b.to_string());
                        return;
                    }
                    ++pairs;
                }
    report(2, true, "conjugation: involution and anti-homomorphism through degree 20",
           std::to_string(pairs) + " products, exhaustive");
}

// 3. two-sided span membership with replayable witnesses
void criterion_3() {
    for (int n = 1; n <= 3; ++n) {
        laws::LawParams p;
        p.ints["n"] = n;
        const auto r = laws::run_law("lemma_5_7", p);
        if (r.verdict != laws::LawReport::Verdict::Verified) {
            report(3, false, "membership for n = " + std::to_string(n), r.witness);
            return;
        }
        if (n == 1 && r.witness.find("(Sq1, Sq1)") == std::string::npos) {
            report(3, false, "membership witness for n = 1 must be (Sq1, Sq1)", r.witness);
            return;
        }
    }
    // n = 4 may exceed the desk budget; undetermined is acceptable, a
    // refutation or error is not
    laws::LawParams p4;
    p4.ints["n"] = 4;
    const auto r4 = laws::run_law("lemma_5_7", p4);
    const bool ok4 = !r4.error && r4.verdict != laws::LawReport::Verdict::Refuted;
    report(3, ok4, "membership with witnesses for n = 1, 2, 3 (n = 4 may be undetermined)",
           "n=4 came back " +
               std::string(r4.verdict == laws::LawReport::Verdict::Verified ? "verified"
                           : r4.verdict == laws::LawReport::Verdict::Refuted ? "refuted"
                                                                             : "undetermined"));
}

// 4. leading-index and conjugation-support facts for n <= 5
void criterion_4() {
    for (int n = 0; n <= 5; ++n) {
        laws::LawParams p;
        p.ints["n"] = n;
        const auto lead = laws::run_law("cartan_serre_leading", p);
        const auto chi = laws::run_law("chi_top_absent", p);
        if (lead.verdict != laws::LawReport::Verdict::Verified ||
            chi.verdict != laws::LawReport::Verdict::Verified) {
            report(4, false, "structural facts at n = " + std::to_string(n),
                   lead.witness + chi.witness);
            return;
        }
    }
    report(4, true, "leading indices above 2^n and absent top conjugate terms, n <= 5",
           "exhaustive within each degree 2^{n+1}");
}

// 5. kernel closure on 200 randomized modules
void criterion_5() {
    laws::LawParams p;
    p.ints["modules"] = 200;
    p.ints["max_top"] = 10;
    p.ints["max_dim"] = 3;
    p.seed = 7;
    const auto r = laws::run_law("lemma_6_2", p);
    report(5, r.verdict == laws::LawReport::Verdict::Verified && !r.error,
           "lower-operation kernels closed on 200 randomized modules", r.witness);
}

// 6. filtration equals the degree filtration on the same corpus
void criterion_6() {
    laws::LawParams p;
    p.ints["modules"] = 200;
    p.ints["max_top"] = 10;
    p.ints["max_dim"] = 3;
    p.seed = 7;
    const auto r = laws::run_law("prop_2_4", p);
    report(6, r.verdict == laws::LawReport::Verdict::Verified && !r.error,
           "criterion-loop filtration equals the degree filtration, 200 modules", r.witness);
}

// 7. layers of K (x) F(1)
void criterion_7() {
    laws::LawParams p;
    p.ints["s_max"] = 4;
    p.ints["dim_max"] = 3;
    p.ints["bound"] = 64;
    const auto r = laws::run_law("cor_2_5", p);
    report(7, r.verdict == laws::LawReport::Verdict::Verified && !r.error,
           "layer dims of K (x) F(1) up to degree 64, s <= 4, dim K <= 3", r.witness);
}

// 8. support patterns up to degree 64
void criterion_8() {
    laws::LawParams p;
    p.ints["bound"] = 64;
    const auto u1 = laws::run_law("support_u1", p);
    const auto u2 = laws::run_law("support_u2", p);
    report(8,
           u1.verdict == laws::LawReport::Verdict::Verified &&
               u2.verdict == laws::LawReport::Verdict::Verified && !u1.error && !u2.error,
           "layer supports in {2^h}, tensor squares in {2^h} or {2^h+2^j}, up to degree 64",
           u1.witness + u2.witness);
}

// 9. Tor checks
void criterion_9() {
    // the exterior page: d^2 = 0 and the connectivity bound are enforced
    // inside bar_tor (it throws otherwise)
    const auto page = tor::bar_tor(fixtures::lambda_x3(), 4, 12);
    for (int s = 0; s <= 4; ++s)
        for (int t = 0; t <= 12; ++t)
            if (page.dim(s, t) != ((t == 3 * s) ? 1u : 0u)) {
                report(9, false, "exterior-algebra Tor dims",
                       "(-" + std::to_string(s) + "," + std::to_string(t) + ")");
                return;
            }
    const auto corner = laws::run_law("tor_corner", laws::LawParams{});
    if (corner.verdict != laws::LawReport::Verdict::Verified) {
        report(9, false, "Tor^{-1} vs indecomposables", corner.witness);
        return;
    }
    // euler bookkeeping on a nontrivial algebra, within fully-covered degrees
    const auto page2 = tor::bar_tor(fixtures::rp3_algebra(), 6, 6);
    for (const auto& ec : tor::euler_checks(fixtures::rp3_algebra(), page2))
        if (ec.t <= 6 && ec.complex_sum != ec.homology_sum) {
            report(9, false, "bar-complex Euler bookkeeping", "t = " + std::to_string(ec.t));
            return;
        }
    report(9, true,
           "exterior Tor line, Tor^{-1} = Q(A) with action, d^2 = 0, connectivity bound",
           "pages recomputed for this run");
}

// 10. the documented discrepancy is reproduced and marked expected
void criterion_10() {
    laws::LawParams p;
    p.ints["n"] = 2;
    const auto r = laws::run_law("adem_display_5", p);
    const bool refuted_with_term = r.verdict == laws::LawReport::Verdict::Refuted &&
                                   r.witness.find("Sq7 Sq1") != std::string::npos;
    const bool marked = r.expected_refuted && r.acceptable();
    report(10, refuted_with_term && marked,
           "displayed decomposition refuted at n = 2 with the extra term, as expected",
           r.witness);
}

// 11. parser fuzzing and round-trips
void criterion_11() {
    std::mt19937_64 rng(0xFEEDFACEull);
    const std::string alphabet = "Sq0123456789 +qS\t\n";
    for (int trial = 0; trial < 100000; ++trial) {
        std::string text;
        const int len = static_cast<int>(rng() % 28);
        for (int i = 0; i < len; ++i) {
            if (rng() % 8 == 0)
                text.push_back(static_cast<char>(rng() % 256));
            else
                text.push_back(alphabet[rng() % alphabet.size()]);
        }
        try {
            (void)parser::parse_op(text);
        } catch (const parser::ParseException& e) {
            if (e.error().position > text.size()) {
                report(11, false, "parser fuzzing", "position out of range on: " + text);
                return;
            }
        } catch (...) {
            report(11, false, "parser fuzzing", "unexpected exception on: " + text);
            return;
        }
    }
    for (int d = 0; d <= 20; ++d)
        for (const auto& m : steenrod::full_basis(d)) {
            const auto s = AdmissibleSum::of(m);
            if (!(steenrod::adem_normalize(parser::parse_op(parser::print_sum(s))) == s)) {
                report(11, false, "print/parse round-trip", m.to_string());
                return;
            }
        }
    std::mt19937_64 rng2(99);
    for (int trial = 0; trial < 2000; ++trial) {
        AdmissibleSum s;
        for (int terms = static_cast<int>(rng2() % 5); terms > 0; --terms) {
            const auto basis = steenrod::full_basis(static_cast<int>(rng2() % 21));
            s ^= AdmissibleSum::of(basis[rng2() % basis.size()]);
        }
        if (s.is_zero())
            continue;
        if (!(steenrod::adem_normalize(parser::parse_op(parser::print_sum(s))) == s)) {
            report(11, false, "print/parse round-trip on sums", parser::print_sum(s));
            return;
        }
    }
    report(11, true, "parser: 10^5 fuzz inputs without a crash; round-trips through degree 20",
           "rejection positions always in range");
}

// 12. byte determinism of the laws run, through the real binary
void criterion_12(const std::string& cli_path) {
    if (cli_path.empty()) {
        report(12, false, "laws --seed 7 --format json byte determinism",
               "no --cli path provided");
        return;
    }
    const std::string out1 = "acceptance_laws_run1.json";
    const std::string out2 = "acceptance_laws_run2.json";
    const std::string cmd1 = "\"" + cli_path + "\" laws --seed 7 --format json > " + out1;
    const std::string cmd2 = "\"" + cli_path + "\" laws --seed 7 --format json > " + out2;
    if (std::system(cmd1.c_str()) != 0 || std::system(cmd2.c_str()) != 0) {
        report(12, false, "laws --seed 7 --format json byte determinism",
               "the laws run exited nonzero");
        return;
    }
    std::ifstream f1(out1, std::ios::binary), f2(out2, std::ios::binary);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    std::remove(out1.c_str());
    std::remove(out2.c_str());
    const bool same = s1.str() == s2.str() && !s1.str().empty();
    report(12, same, "two runs of 'laws --seed 7 --format json' are byte-identical",
           std::to_string(s1.str().size()) + " bytes each");
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli")
            cli_path = argv[i + 1];

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12(cli_path);

    if (failures) {
        std::printf("ACCEPTANCE: %d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("ACCEPTANCE: all 12 criteria passed\n");
    return 0;
}
