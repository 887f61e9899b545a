#ifndef NILOPS_TESTS_EVAL_ORACLE_HPP
#define NILOPS_TESTS_EVAL_ORACLE_HPP

#include <map>
#include <set>
#include <vector>

#include "nilops/binom.hpp"
#include "nilops/steenrod.hpp"

// Faithful-evaluation oracle for the Steenrod algebra, independent of the
// Adem rewriting engine. Operations of degree <= n act on the class
// w = u_1 ... u_n in F_2[u_1, ..., u_n] through the Cartan formula and
// Sq^1 u = u^2; admissible monomials act linearly independently on w, so
// agreement on w decides equality in degrees <= n.
//
// Everything reachable from w has power-of-two exponents and is symmetric,
// so a polynomial is stored by orbit: the key counts, per exponent class
// 2^j, how many variables carry that exponent.
namespace oracle {

using ExponentCounts = std::vector<int>;  // counts[j] = #variables with exponent 2^j

struct SymPoly {
    int nvars = 0;
    std::set<ExponentCounts> orbits;  // present = coefficient 1

    bool operator==(const SymPoly& o) const { return nvars == o.nvars && orbits == o.orbits; }
};

inline SymPoly top_class(int n) {
    SymPoly p;
    p.nvars = n;
    ExponentCounts w = {n};
    p.orbits.insert(w);
    return p;
}

// Sq^i on a symmetric polynomial: double the exponents of a subset of
// variables whose exponents sum to i. For a fixed target monomial, the
// preimage count mod 2 is a product of binomials over the target's counts.
inline SymPoly apply_sq(int i, const SymPoly& p) {
    if (i == 0)
        return p;
    SymPoly out;
    out.nvars = p.nvars;
    for (const auto& lambda : p.orbits) {
        // s[j] = how many exponent-2^j variables get doubled; sum s[j]*2^j = i
        const std::size_t classes = lambda.size();
        std::vector<int> s(classes, 0);
        auto emit = [&]() {
            ExponentCounts mu(classes + 1, 0);
            for (std::size_t k = 0; k < classes; ++k)
                mu[k] = lambda[k] - s[k];
            for (std::size_t k = 0; k < classes; ++k)
                mu[k + 1] += s[k];
            int coeff = 1;
            for (std::size_t k = 0; k < classes && coeff; ++k)
                coeff &= nilops::binom_mod2(mu[k + 1], s[k]);
            if (!coeff)
                return;
            while (!mu.empty() && mu.back() == 0)
                mu.pop_back();
            auto it = out.orbits.find(mu);
            if (it != out.orbits.end())
                out.orbits.erase(it);
            else
                out.orbits.insert(mu);
        };
        auto rec = [&](auto&& self, std::size_t j, int rem) -> void {
            if (j == classes) {
                if (rem == 0)
                    emit();
                return;
            }
            const int cap = std::min(lambda[j], rem >> j);
            for (int take = 0; take <= cap; ++take) {
                s[j] = take;
                self(self, j + 1, rem - (take << j));
            }
            s[j] = 0;
        };
        rec(rec, 0, i);
    }
    return out;
}

// Composite Sq^{i1} ... Sq^{ik} acting on p (rightmost factor first).
inline SymPoly apply_word(const std::vector<int>& word, SymPoly p) {
    for (auto it = word.rbegin(); it != word.rend(); ++it)
        p = apply_sq(*it, p);
    return p;
}

inline SymPoly apply_sum(const nilops::steenrod::AdmissibleSum& a, const SymPoly& p) {
    SymPoly out;
    out.nvars = p.nvars;
    for (const auto& mono : a.monomials()) {
        const SymPoly term = apply_word(mono.indices, p);
        for (const auto& orbit : term.orbits) {
            auto it = out.orbits.find(orbit);
            if (it != out.orbits.end())
                out.orbits.erase(it);
            else
                out.orbits.insert(orbit);
        }
    }
    return out;
}

/// Do the composite word and the sum act identically on u_1 ... u_n?
/// Complete equality test when both have degree <= n.
inline bool word_matches_sum_on_top_class(const std::vector<int>& word,
                                          const nilops::steenrod::AdmissibleSum& sum, int n) {
    return apply_word(word, top_class(n)) == apply_sum(sum, top_class(n));
}

inline bool sums_agree_on_top_class(const nilops::steenrod::AdmissibleSum& a,
                                    const nilops::steenrod::AdmissibleSum& b, int n) {
    return apply_sum(a, top_class(n)) == apply_sum(b, top_class(n));
}

// ---------------------------------------------------------------------
// Dense (non-symmetric) evaluation on arbitrary monomials, used to
// cross-check the orbit bookkeeping above on small inputs. Exponentially
// slower; exponents are arbitrary nonnegative integers.

struct DensePoly {
    int nvars = 0;
    std::set<std::vector<int>> monos;  // exponent vectors, coefficient 1
};

inline DensePoly dense_top_class(int n) {
    DensePoly p;
    p.nvars = n;
    p.monos.insert(std::vector<int>(static_cast<std::size_t>(n), 1));
    return p;
}

inline void dense_insert(DensePoly& p, const std::vector<int>& m) {
    auto it = p.monos.find(m);
    if (it != p.monos.end())
        p.monos.erase(it);
    else
        p.monos.insert(m);
}

// Cartan over variables: Sq^i(u^e) = binom(e, i) u^{e+i} per variable.
inline DensePoly dense_apply_sq(int i, const DensePoly& p) {
    if (i == 0)
        return p;
    DensePoly out;
    out.nvars = p.nvars;
    for (const auto& mono : p.monos) {
        std::vector<int> cur(mono);
        // distribute i over variables
        std::vector<int> parts(static_cast<std::size_t>(p.nvars), 0);
        auto rec = [&](auto&& self, std::size_t v, int rem) -> void {
            if (v + 1 == parts.size()) {
                parts[v] = rem;
                int coeff = 1;
                std::vector<int> target(mono);
                for (std::size_t k = 0; k < parts.size() && coeff; ++k) {
                    coeff &= nilops::binom_mod2(mono[k], parts[k]);
                    target[k] = mono[k] + parts[k];
                }
                if (coeff)
                    dense_insert(out, target);
                return;
            }
            for (int take = 0; take <= rem; ++take) {
                parts[v] = take;
                self(self, v + 1, rem - take);
            }
        };
        if (p.nvars > 0)
            rec(rec, 0, i);
    }
    return out;
}

inline DensePoly dense_apply_word(const std::vector<int>& word, DensePoly p) {
    for (auto it = word.rbegin(); it != word.rend(); ++it)
        p = dense_apply_sq(*it, p);
    return p;
}

}  // namespace oracle

#endif
