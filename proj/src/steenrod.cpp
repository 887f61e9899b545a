#include "nilops/steenrod.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

#include "nilops/binom.hpp"

namespace nilops::steenrod {

bool Monomial::admissible() const {
    for (std::size_t j = 0; j + 1 < indices.size(); ++j)
        if (indices[j] < 2 * indices[j + 1])
            return false;
    return true;
}

int Monomial::excess() const {
    if (indices.empty())
        return 0;
    return 2 * indices.front() - degree();
}

bool Monomial::operator<(const Monomial& o) const {
    const int da = degree(), db = o.degree();
    if (da != db)
        return da < db;
    // reverse-lexicographic within a degree
    return std::lexicographical_compare(o.indices.begin(), o.indices.end(),
                                        indices.begin(), indices.end());
}

std::string Monomial::to_string() const {
    if (indices.empty())
        return "1";
    std::ostringstream os;
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (j)
            os << ' ';
        os << "Sq" << indices[j];
    }
    return os.str();
}

std::string Expression::to_string() const {
    if (terms.empty())
        return "0";
    std::ostringstream os;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        if (t)
            os << " + ";
        os << terms[t].to_string();
    }
    return os.str();
}

AdmissibleSum AdmissibleSum::sq(int i) {
    if (i < 0)
        throw shape_error("Sq index must be >= 0");
    if (i == 0)
        return unit();
    return of(Monomial({i}));
}

AdmissibleSum AdmissibleSum::of(Monomial m) {
    if (!m.admissible())
        throw shape_error("AdmissibleSum::of: monomial is not admissible: " + m.to_string());
    AdmissibleSum s;
    s.monos_.push_back(std::move(m));
    return s;
}

AdmissibleSum AdmissibleSum::of_terms(std::vector<Monomial> monos) {
    AdmissibleSum s;
    for (auto& m : monos)
        s.insert_mod2(std::move(m));
    return s;
}

void AdmissibleSum::insert_mod2(Monomial m) {
    if (!m.admissible())
        throw shape_error("AdmissibleSum: monomial is not admissible: " + m.to_string());
    auto it = std::lower_bound(monos_.begin(), monos_.end(), m);
    if (it != monos_.end() && *it == m)
        monos_.erase(it);  // pairs cancel over GF(2)
    else
        monos_.insert(it, std::move(m));
}

bool AdmissibleSum::homogeneous(int* degree_out) const {
    if (monos_.empty()) {
        if (degree_out)
            *degree_out = 0;
        return true;
    }
    const int d = monos_.front().degree();
    for (const auto& m : monos_)
        if (m.degree() != d)
            return false;
    if (degree_out)
        *degree_out = d;
    return true;
}

bool AdmissibleSum::contains(const Monomial& m) const {
    return std::binary_search(monos_.begin(), monos_.end(), m);
}

AdmissibleSum& AdmissibleSum::operator^=(const AdmissibleSum& o) {
    for (const auto& m : o.monos_)
        insert_mod2(m);
    return *this;
}

std::string AdmissibleSum::to_string() const {
    if (monos_.empty())
        return "0";
    std::ostringstream os;
    for (std::size_t t = 0; t < monos_.size(); ++t) {
        if (t)
            os << " + ";
        os << monos_[t].to_string();
    }
    return os.str();
}

AdmissibleSum adem_pair(int a, int b) {
    if (a <= 0 || b <= 0 || a >= 2 * b)
        throw shape_error("adem_pair expects an inadmissible pair 0 < a < 2b");
    AdmissibleSum out;
    for (int c = 0; 2 * c <= a; ++c) {
        if (!binom_mod2(b - c - 1, a - 2 * c))
            continue;
        if (c == 0)
            out ^= AdmissibleSum::of(Monomial({a + b}));
        else
            out ^= AdmissibleSum::of(Monomial({a + b - c, c}));
    }
    return out;
}

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (int x : v) {
            h ^= static_cast<std::size_t>(x);
            h *= 1099511628211ull;
        }
        return h;
    }
};

// Rewriting works right to left: left_mul(k, m) is Sq^k * m for m already
// admissible. The word-level memo is confined per thread, so concurrent
// callers never contend and results stay order-independent.
AdmissibleSum left_mul(int k, const Monomial& m);

AdmissibleSum left_mul_sum(int k, const AdmissibleSum& s) {
    AdmissibleSum out;
    for (const auto& m : s.monomials())
        out ^= left_mul(k, m);
    return out;
}

AdmissibleSum left_mul(int k, const Monomial& m) {
    if (k == 0)
        return AdmissibleSum::of(m);
    if (m.is_unit())
        return AdmissibleSum::of(Monomial({k}));
    if (k >= 2 * m.indices.front()) {
        Monomial out;
        out.indices.reserve(m.indices.size() + 1);
        out.indices.push_back(k);
        out.indices.insert(out.indices.end(), m.indices.begin(), m.indices.end());
        return AdmissibleSum::of(std::move(out));
    }

    thread_local std::unordered_map<std::vector<int>, AdmissibleSum, VecHash> memo;
    std::vector<int> key;
    key.reserve(m.indices.size() + 1);
    key.push_back(k);
    key.insert(key.end(), m.indices.begin(), m.indices.end());
    if (auto it = memo.find(key); it != memo.end())
        return it->second;

    const Monomial rest(std::vector<int>(m.indices.begin() + 1, m.indices.end()));
    AdmissibleSum out;
    const AdmissibleSum expansion = adem_pair(k, m.indices.front());
    for (const auto& t : expansion.monomials()) {
        if (t.length() == 1) {
            out ^= left_mul(t.indices[0], rest);
        } else {
            out ^= left_mul_sum(t.indices[0], left_mul(t.indices[1], rest));
        }
    }
    memo.emplace(std::move(key), out);
    return out;
}

}  // namespace

AdmissibleSum adem_normalize(const Monomial& m) {
    for (int i : m.indices)
        if (i < 1)
            throw shape_error("monomial index must be >= 1");
    AdmissibleSum acc = AdmissibleSum::unit();
    for (auto it = m.indices.rbegin(); it != m.indices.rend(); ++it)
        acc = left_mul_sum(*it, acc);
    return acc;
}

AdmissibleSum adem_normalize(const Expression& e) {
    AdmissibleSum out;
    for (const auto& t : e.terms)
        out ^= adem_normalize(t);
    return out;
}

AdmissibleSum multiply(const AdmissibleSum& a, const AdmissibleSum& b) {
    AdmissibleSum out;
    for (const auto& ma : a.monomials()) {
        for (const auto& mb : b.monomials()) {
            Monomial cat;
            cat.indices.reserve(ma.indices.size() + mb.indices.size());
            cat.indices.insert(cat.indices.end(), ma.indices.begin(), ma.indices.end());
            cat.indices.insert(cat.indices.end(), mb.indices.begin(), mb.indices.end());
            out ^= adem_normalize(cat);
        }
    }
    return out;
}

namespace {

// chi(Sq^n) by the antipode recursion, memoized per thread.
const AdmissibleSum& conjugate_sq(int n) {
    thread_local std::vector<AdmissibleSum> memo = {AdmissibleSum::unit()};
    if (n < static_cast<int>(memo.size()))
        return memo[static_cast<std::size_t>(n)];
    for (int m = static_cast<int>(memo.size()); m <= n; ++m) {
        AdmissibleSum acc;
        for (int i = 1; i <= m; ++i)
            acc ^= multiply(AdmissibleSum::sq(i), memo[static_cast<std::size_t>(m - i)]);
        memo.push_back(std::move(acc));
    }
    return memo[static_cast<std::size_t>(n)];
}

}  // namespace

AdmissibleSum conjugate(const AdmissibleSum& a) {
    AdmissibleSum out;
    for (const auto& m : a.monomials()) {
        AdmissibleSum term = AdmissibleSum::unit();
        // anti-homomorphism: chi(m1 m2 ... mk) = chi(mk) ... chi(m1)
        for (auto it = m.indices.rbegin(); it != m.indices.rend(); ++it)
            term = multiply(term, conjugate_sq(*it));
        out ^= term;
    }
    return out;
}

int excess(const Monomial& m) {
    if (!m.admissible())
        throw shape_error("excess is defined on admissible monomials");
    return m.excess();
}

namespace {

void enumerate_admissible(int degree, int lead_cap, std::vector<int>& prefix,
                          std::vector<Monomial>& out) {
    if (degree == 0) {
        out.emplace_back(prefix);
        return;
    }
    for (int i1 = std::min(degree, lead_cap); i1 >= 1; --i1) {
        // the remaining word must be admissible with lead <= i1/2, so its
        // degree is at most i1/2 + i1/4 + ... < i1
        if (degree - i1 >= i1)
            continue;
        prefix.push_back(i1);
        enumerate_admissible(degree - i1, i1 / 2, prefix, out);
        prefix.pop_back();
    }
}

const std::vector<Monomial>& cached_basis(int degree) {
    thread_local std::map<int, std::vector<Monomial>> cache;
    auto it = cache.find(degree);
    if (it != cache.end())
        return it->second;
    std::vector<Monomial> out;
    std::vector<int> prefix;
    enumerate_admissible(degree, degree, prefix, out);
    std::sort(out.begin(), out.end());
    return cache.emplace(degree, std::move(out)).first->second;
}

}  // namespace

std::vector<Monomial> full_basis(int degree) {
    if (degree < 0)
        throw shape_error("full_basis: degree must be >= 0");
    return cached_basis(degree);
}

std::size_t basis_index(const Monomial& m) {
    const auto& basis = cached_basis(m.degree());
    const auto it = std::lower_bound(basis.begin(), basis.end(), m);
    if (it == basis.end() || !(*it == m))
        throw internal_error("basis_index: monomial not found: " + m.to_string());
    return static_cast<std::size_t>(it - basis.begin());
}

gf2::BitVec coordinates(const AdmissibleSum& a, int degree) {
    int d = 0;
    if (!a.homogeneous(&d))
        throw shape_error("coordinates: sum is not homogeneous");
    if (!a.is_zero() && d != degree)
        throw shape_error("coordinates: sum lives in degree " + std::to_string(d) +
                          ", asked for " + std::to_string(degree));
    const auto& basis = cached_basis(degree);
    gf2::BitVec v(basis.size());
    for (const auto& m : a.monomials()) {
        const auto it = std::lower_bound(basis.begin(), basis.end(), m);
        v.set(static_cast<std::size_t>(it - basis.begin()), true);
    }
    return v;
}

std::size_t SubalgebraBasis::total_dim() const {
    std::size_t n = 0;
    for (const auto& d : by_degree)
        n += d.size();
    return n;
}

SubalgebraBasis subalgebra_basis(int n, int degree_bound) {
    if (n < 0 || degree_bound < 0)
        throw shape_error("subalgebra_basis: n and degree_bound must be >= 0");
    SubalgebraBasis out;
    out.n = n;
    out.degree_bound = degree_bound;
    out.by_degree.resize(static_cast<std::size_t>(degree_bound) + 1);
    out.by_degree[0].push_back(AdmissibleSum::unit());

    std::vector<int> generators;
    for (int j = 0; (1 << j) <= std::min(1 << n, degree_bound) && j <= n; ++j)
        generators.push_back(1 << j);

    // span degree by degree: A(n)_d = sum over generators g of g * A(n)_{d-|g|}
    for (int d = 1; d <= degree_bound; ++d) {
        const auto basis = full_basis(d);
        gf2::Span span(basis.size());
        std::vector<AdmissibleSum> kept;
        for (int g : generators) {
            if (g > d)
                continue;
            for (const auto& x : out.by_degree[static_cast<std::size_t>(d - g)]) {
                AdmissibleSum prod = multiply(AdmissibleSum::sq(g), x);
                if (prod.is_zero())
                    continue;
                if (span.insert(coordinates(prod, d)))
                    kept.push_back(std::move(prod));
            }
        }
        out.by_degree[static_cast<std::size_t>(d)] = std::move(kept);
    }
    return out;
}

std::optional<IdealWitness> ideal_membership(const AdmissibleSum& target, int n) {
    if (n < 1)
        throw shape_error("ideal_membership: n must be >= 1");
    const int half = 1 << n;
    const int full = 1 << (n + 1);
    int tdeg = 0;
    if (!target.homogeneous(&tdeg))
        throw shape_error("ideal_membership: target is not homogeneous");
    if (!target.is_zero() && tdeg != full)
        throw shape_error("ideal_membership: target degree " + std::to_string(tdeg) +
                          " does not match 2^{n+1} = " + std::to_string(full));
    if (target.is_zero())
        return IdealWitness{};  // member, empty witness

    const SubalgebraBasis sub = subalgebra_basis(n - 1, half - 1);
    const AdmissibleSum middle = AdmissibleSum::sq(half);

    std::vector<std::pair<AdmissibleSum, AdmissibleSum>> candidates;
    std::vector<gf2::BitVec> columns;
    const std::size_t ambient = full_basis(full).size();
    for (int da = 1; da <= half - 1; ++da) {
        const int db = half - da;
        for (const auto& a : sub.by_degree[static_cast<std::size_t>(da)]) {
            for (const auto& b : sub.by_degree[static_cast<std::size_t>(db)]) {
                AdmissibleSum prod = multiply(multiply(a, middle), b);
                columns.push_back(prod.is_zero() ? gf2::BitVec(ambient)
                                                 : coordinates(prod, full));
                candidates.emplace_back(a, b);
            }
        }
    }

    const gf2::BitMatrix mat = gf2::BitMatrix::from_cols(columns, ambient);
    const auto x = gf2::solve(mat, coordinates(target, full));
    if (!x)
        return std::nullopt;
    IdealWitness w;
    x->for_each_set([&](std::size_t j) { w.pairs.push_back(candidates[j]); });
    return w;
}

}  // namespace nilops::steenrod
