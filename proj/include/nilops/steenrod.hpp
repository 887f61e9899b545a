#ifndef NILOPS_STEENROD_HPP
#define NILOPS_STEENROD_HPP

#include <compare>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nilops/gf2.hpp"

namespace nilops::steenrod {

/// A composite Sq^{i_1} ... Sq^{i_k}. The empty sequence is the unit.
/// Monomial does not enforce admissibility by itself; AdmissibleSum does.
struct Monomial {
    std::vector<int> indices;

    Monomial() = default;
    explicit Monomial(std::vector<int> idx) : indices(std::move(idx)) {}

    bool is_unit() const { return indices.empty(); }
    int length() const { return static_cast<int>(indices.size()); }

    int degree() const {
        int d = 0;
        for (int i : indices)
            d += i;
        return d;
    }

    /// i_j >= 2*i_{j+1} for all consecutive pairs (unit and singletons pass).
    bool admissible() const;

    /// 2*i_1 - degree; 0 for the unit. Nonnegative on admissibles.
    int excess() const;

    bool operator==(const Monomial& o) const { return indices == o.indices; }

    /// Canonical order: by degree, then reverse-lexicographic on the index
    /// sequence, so Sq7 Sq1 precedes Sq6 Sq2.
    bool operator<(const Monomial& o) const;

    std::string to_string() const;  // "Sq4 Sq2 Sq1", "1" for the unit
};

/// Parser-level sum of arbitrary (possibly inadmissible) monomials.
/// Repeated terms are meaningful: coefficients are mod 2.
struct Expression {
    std::vector<Monomial> terms;

    std::string to_string() const;
};

/// Canonical element of the mod-2 Steenrod algebra: a set of admissible
/// monomials in canonical order (presence = coefficient 1).
class AdmissibleSum {
public:
    AdmissibleSum() = default;

    static AdmissibleSum zero() { return AdmissibleSum(); }
    static AdmissibleSum unit() { return of(Monomial()); }
    static AdmissibleSum sq(int i);
    static AdmissibleSum of(Monomial m);
    static AdmissibleSum of_terms(std::vector<Monomial> monos);  // folds mod 2

    const std::vector<Monomial>& monomials() const { return monos_; }
    bool is_zero() const { return monos_.empty(); }

    /// All terms of one degree; 0 counts as homogeneous of any degree.
    bool homogeneous(int* degree_out = nullptr) const;

    bool contains(const Monomial& m) const;

    AdmissibleSum& operator^=(const AdmissibleSum& o);
    friend AdmissibleSum operator^(AdmissibleSum a, const AdmissibleSum& b) {
        a ^= b;
        return a;
    }

    bool operator==(const AdmissibleSum& o) const { return monos_ == o.monos_; }
    bool operator!=(const AdmissibleSum& o) const { return !(*this == o); }

    std::string to_string() const;  // canonical print; "0" for zero

private:
    std::vector<Monomial> monos_;

    void insert_mod2(Monomial m);
};

/// Rewrite an arbitrary composite into canonical admissible form using the
/// Adem relations (Sq^a Sq^b = sum_c binom(b-c-1, a-2c) Sq^{a+b-c} Sq^c for
/// a < 2b). Terminating; idempotent on admissible input.
AdmissibleSum adem_normalize(const Monomial& m);
AdmissibleSum adem_normalize(const Expression& e);

/// Single Adem expansion of an inadmissible pair (a < 2b), as an
/// AdmissibleSum of length <= 2 monomials.
AdmissibleSum adem_pair(int a, int b);

AdmissibleSum multiply(const AdmissibleSum& a, const AdmissibleSum& b);

/// Antipode chi: extends the recursion sum_{i+j=n} Sq^i chi(Sq^j) = 0 as an
/// anti-homomorphism. An involution.
AdmissibleSum conjugate(const AdmissibleSum& a);

int excess(const Monomial& m);

/// All admissible monomials of exactly the given degree, canonical order.
std::vector<Monomial> full_basis(int degree);

/// Column index of an admissible monomial within full_basis(degree).
std::size_t basis_index(const Monomial& m);

/// Coordinates of a homogeneous sum in full_basis(degree).
gf2::BitVec coordinates(const AdmissibleSum& a, int degree);

/// Per-degree GF(2) basis of the subalgebra A(n) generated by
/// Sq^1, Sq^2, ..., Sq^{2^n}, computed by spanning up to degree_bound.
struct SubalgebraBasis {
    int n = 0;
    int degree_bound = 0;
    std::vector<std::vector<AdmissibleSum>> by_degree;  // index = degree

    std::size_t dim(int d) const {
        if (d < 0 || d >= static_cast<int>(by_degree.size()))
            return 0;
        return by_degree[static_cast<std::size_t>(d)].size();
    }
    std::size_t total_dim() const;
};

SubalgebraBasis subalgebra_basis(int n, int degree_bound);

/// Witness for membership of target in span{ a Sq^{2^n} b } with a, b
/// positive-degree elements of A(n-1) and deg a + deg b = 2^n.
struct IdealWitness {
    std::vector<std::pair<AdmissibleSum, AdmissibleSum>> pairs;  // (a_j, b_j)
};

/// Decide the degree-2^{n+1} membership question; empty optional = not a
/// member. Throws Shape if target is not homogeneous of degree 2^{n+1}.
std::optional<IdealWitness> ideal_membership(const AdmissibleSum& target, int n);

}  // namespace nilops::steenrod

#endif
