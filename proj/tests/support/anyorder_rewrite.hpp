#ifndef NILOPS_TESTS_ANYORDER_REWRITE_HPP
#define NILOPS_TESTS_ANYORDER_REWRITE_HPP

#include <utility>
#include <vector>

#include "nilops/binom.hpp"
#include "nilops/steenrod.hpp"
#include "support/rng.hpp"

// Naive rewriting that picks inadmissible pairs in an arbitrary
// (seed-driven) order. Used to check that the engine's normal forms do not
// depend on rewriting strategy.
namespace testsupport {

inline nilops::steenrod::AdmissibleSum normalize_random_order(
    const nilops::steenrod::Monomial& start, Rng& rng, int step_budget = 2'000'000) {
    using nilops::steenrod::AdmissibleSum;
    using nilops::steenrod::Monomial;

    std::vector<std::vector<int>> terms = {start.indices};
    while (true) {
        // collect every inadmissible adjacent pair in every term
        std::vector<std::pair<std::size_t, std::size_t>> sites;
        for (std::size_t t = 0; t < terms.size(); ++t)
            for (std::size_t p = 0; p + 1 < terms[t].size(); ++p)
                if (terms[t][p] < 2 * terms[t][p + 1])
                    sites.emplace_back(t, p);
        if (sites.empty())
            break;
        if (--step_budget < 0)
            throw nilops::budget_error("random-order rewriting exceeded its step budget");

        const auto [t, p] = sites[rng.below(sites.size())];
        const std::vector<int> word = terms[t];
        terms.erase(terms.begin() + static_cast<long>(t));
        const int a = word[p], b = word[p + 1];
        for (int c = 0; 2 * c <= a; ++c) {
            if (!nilops::binom_mod2(b - c - 1, a - 2 * c))
                continue;
            std::vector<int> next(word.begin(), word.begin() + static_cast<long>(p));
            next.push_back(a + b - c);
            if (c > 0)
                next.push_back(c);
            next.insert(next.end(), word.begin() + static_cast<long>(p) + 2, word.end());
            terms.push_back(std::move(next));
        }
    }

    std::vector<Monomial> monos;
    monos.reserve(terms.size());
    for (auto& w : terms)
        monos.emplace_back(std::move(w));
    return AdmissibleSum::of_terms(std::move(monos));
}

}  // namespace testsupport

#endif
