#include "nilops/tor.hpp"

#include <algorithm>
#include <sstream>

namespace nilops::tor {

using gf2::BitMatrix;
using gf2::BitVec;

namespace {

// one tensor factor: (degree, basis index) in the augmentation ideal
using Factor = std::pair<int, std::size_t>;
using Tuple = std::vector<Factor>;

struct BarBasis {
    std::vector<Tuple> tuples;
    std::map<Tuple, std::size_t> index;

    std::size_t size() const { return tuples.size(); }
};

// all degree-t tuples of s positive-degree basis elements, ordered
// lexicographically (deterministic)
BarBasis bar_basis(const FiniteUnstableModule& m, int s, int t) {
    BarBasis out;
    Tuple cur;
    auto rec = [&](auto&& self, int parts_left, int deg_left) -> void {
        if (parts_left == 0) {
            if (deg_left == 0) {
                out.index.emplace(cur, out.tuples.size());
                out.tuples.push_back(cur);
            }
            return;
        }
        for (int d = 1; d <= deg_left - (parts_left - 1); ++d) {
            if (d > m.top_degree())
                break;
            const std::size_t n = m.dim(d);
            for (std::size_t i = 0; i < n; ++i) {
                cur.emplace_back(d, i);
                self(self, parts_left - 1, deg_left - d);
                cur.pop_back();
            }
        }
    };
    if (s == 0) {
        if (t == 0) {
            out.index.emplace(Tuple{}, 0);
            out.tuples.push_back({});
        }
        return out;
    }
    rec(rec, s, t);
    return out;
}

// bar differential: sum over adjacent multiplications (signs vanish mod 2)
BitMatrix bar_differential(const FiniteUnstableAlgebra& a, const BarBasis& src,
                           const BarBasis& dst) {
    BitMatrix out(dst.size(), src.size());
    const FiniteUnstableModule& m = a.module();
    for (std::size_t c = 0; c < src.size(); ++c) {
        const Tuple& tup = src.tuples[c];
        for (std::size_t pos = 0; pos + 1 < tup.size(); ++pos) {
            const auto& [d1, i1] = tup[pos];
            const auto& [d2, i2] = tup[pos + 1];
            if (d1 + d2 > m.top_degree())
                continue;  // the product is zero in the truncation
            const BitVec prod = a.mul(d1, BitVec::unit(m.dim(d1), i1), d2,
                                      BitVec::unit(m.dim(d2), i2));
            prod.for_each_set([&](std::size_t b) {
                Tuple merged;
                merged.reserve(tup.size() - 1);
                merged.insert(merged.end(), tup.begin(), tup.begin() + static_cast<long>(pos));
                merged.emplace_back(d1 + d2, b);
                merged.insert(merged.end(), tup.begin() + static_cast<long>(pos) + 2, tup.end());
                const auto it = dst.index.find(merged);
                if (it == dst.index.end())
                    throw internal_error("bar differential produced an unknown tuple");
                out.set(it->second, c, !out.get(it->second, c));
            });
        }
    }
    return out;
}

// Sq^i across the tensor factors by the Cartan formula
BitVec bar_action(const FiniteUnstableModule& m, const BarBasis& src, const BarBasis& dst, int i,
                  const BitVec& x) {
    BitVec out(dst.size());
    auto add_tuple = [&](const Tuple& tup) {
        const auto it = dst.index.find(tup);
        if (it == dst.index.end())
            throw internal_error("bar action produced an unknown tuple");
        out.flip(it->second);
    };
    x.for_each_set([&](std::size_t c) {
        const Tuple& tup = src.tuples[c];
        Tuple target(tup.size(), {0, 0});
        // distribute i = j_1 + ... + j_s over the factors
        auto rec = [&](auto&& self, std::size_t pos, int rem) -> void {
            if (pos == tup.size()) {
                if (rem == 0)
                    add_tuple(target);
                return;
            }
            const auto& [d, idx] = tup[pos];
            for (int j = 0; j <= rem; ++j) {
                if (d + j > m.top_degree()) {
                    break;  // every further j lands past the top: zero
                }
                const BitVec image = m.act_sq(j, d, BitVec::unit(m.dim(d), idx));
                if (image.size() == 0)
                    continue;
                bool any = false;
                image.for_each_set([&](std::size_t b) {
                    any = true;
                    target[pos] = {d + j, b};
                    self(self, pos + 1, rem - j);
                });
                (void)any;
            }
        };
        if (tup.empty()) {
            if (i == 0)
                add_tuple(tup);
            return;
        }
        rec(rec, 0, i);
    });
    return out;
}

std::string tuple_label(const FiniteUnstableModule& m, const Tuple& tup) {
    if (tup.empty())
        return "[]";
    std::ostringstream os;
    os << "[";
    for (std::size_t p = 0; p < tup.size(); ++p) {
        if (p)
            os << "|";
        os << m.space().label(tup[p].first, tup[p].second);
    }
    os << "]";
    return os.str();
}

}  // namespace

TorPage bar_tor(const FiniteUnstableAlgebra& a, int s_max, int t_max) {
    if (s_max < 0 || t_max < 0)
        throw shape_error("bar_tor: bounds must be >= 0");
    const FiniteUnstableModule& m = a.module();

    int conn = m.top_degree();  // connectivity of the augmentation ideal
    for (int d = 1; d <= m.top_degree(); ++d)
        if (m.dim(d) > 0) {
            conn = d - 1;
            break;
        }

    TorPage page;
    page.s_max = s_max;
    page.t_max = t_max;

    // bases and differentials for every needed (s, t)
    std::map<std::pair<int, int>, BarBasis> bases;
    for (int s = 0; s <= s_max + 1; ++s)
        for (int t = 0; t <= t_max; ++t)
            bases.emplace(std::make_pair(s, t), bar_basis(m, s, t));
    auto basis_of = [&](int s, int t) -> const BarBasis& { return bases.at({s, t}); };

    std::map<std::pair<int, int>, BitMatrix> diff;  // d_s at internal degree t
    for (int s = 1; s <= s_max + 1; ++s)
        for (int t = 0; t <= t_max; ++t)
            diff.emplace(std::make_pair(s, t),
                         bar_differential(a, basis_of(s, t), basis_of(s - 1, t)));

    // d^2 = 0 before any homology is taken
    for (int s = 2; s <= s_max + 1; ++s)
        for (int t = 0; t <= t_max; ++t)
            if (!(diff.at({s - 1, t}) * diff.at({s, t})).is_zero())
                throw internal_error("bar differential does not square to zero at (" +
                                     std::to_string(s) + "," + std::to_string(t) + ")");

    // homology per slot; the slots are independent given the differentials
    std::vector<std::pair<int, int>> slots;
    for (int s = 0; s <= s_max; ++s)
        for (int t = 0; t <= t_max; ++t)
            slots.emplace_back(s, t);
    std::vector<std::optional<gf2::Subquotient>> hom(slots.size());
#pragma omp parallel for schedule(dynamic)
    for (long idx = 0; idx < static_cast<long>(slots.size()); ++idx) {
        const auto [s, t] = slots[static_cast<std::size_t>(idx)];
        const BarBasis& here = basis_of(s, t);
        if (here.size() == 0)
            continue;
        // cycles
        std::vector<BitVec> cycles;
        if (s == 0) {
            for (std::size_t i = 0; i < here.size(); ++i)
                cycles.push_back(BitVec::unit(here.size(), i));
        } else {
            cycles = gf2::kernel_basis(diff.at({s, t}));
        }
        // boundaries
        std::vector<BitVec> boundaries;
        const BitMatrix& dnext = diff.at({s + 1, t});
        for (std::size_t c = 0; c < dnext.cols(); ++c) {
            const BitVec b = dnext.col(c);
            if (!b.is_zero())
                boundaries.push_back(b);
        }
        hom[static_cast<std::size_t>(idx)].emplace(here.size(), cycles, boundaries);
    }

    for (std::size_t idx = 0; idx < slots.size(); ++idx) {
        const auto [s, t] = slots[idx];
        if (!hom[idx] || hom[idx]->dim() == 0)
            continue;
        TorEntry e;
        e.s = s;
        e.t = t;
        e.dim = hom[idx]->dim();
        for (std::size_t i = 0; i < e.dim; ++i) {
            e.representatives.push_back(hom[idx]->representative(i));
            // label by the lexicographically first tuple in the cycle
            const BitVec& rep = e.representatives.back();
            const std::size_t lead = rep.lowest_set();
            e.rep_labels.push_back(tuple_label(m, basis_of(s, t).tuples[lead]));
        }
        // connectivity bound: the whole column vanishes below s*(conn+1)
        if (t < s * (conn + 1))
            throw internal_error("Tor entry below the connectivity bound at (" +
                                 std::to_string(s) + "," + std::to_string(t) + ")");
        page.entries.emplace(std::make_pair(s, t), std::move(e));
    }

    // Steenrod action on representatives, instability asserted, descent
    // verified through the cycle/boundary projection
    std::map<std::pair<int, int>, std::size_t> slot_index;
    for (std::size_t idx = 0; idx < slots.size(); ++idx)
        slot_index.emplace(slots[idx], idx);
    for (auto& [key, e] : page.entries) {
        const auto [s, t] = key;
        for (int i = 1; i <= t; ++i) {
            if (t + i > t_max) {
                e.action_complete = false;
                break;
            }
            const BarBasis& src = basis_of(s, t);
            const BarBasis& dst = basis_of(s, t + i);
            const std::size_t target_dim = page.dim(s, t + i);
            BitMatrix mat(target_dim, e.dim);
            for (std::size_t c = 0; c < e.dim; ++c) {
                const BitVec v = bar_action(m, src, dst, i, e.representatives[c]);
                if (v.is_zero())
                    continue;
                // the action of a cycle is a cycle
                if (s >= 1 && !diff.at({s, t + i}).apply(v).is_zero())
                    throw internal_error("Steenrod action broke a cycle at (" + std::to_string(s) +
                                         "," + std::to_string(t) + ")");
                // descend: the cycle splits into representatives + boundaries
                const auto& target_hom = hom[slot_index.at({s, t + i})];
                if (!target_hom)
                    throw internal_error("Steenrod action left the computed chain groups");
                const BitVec coords = target_hom->project(v);
                coords.for_each_set([&](std::size_t r) { mat.set(r, c, true); });
            }
            if (target_dim > 0)
                e.action[i] = std::move(mat);
        }
        // instability in the internal grading holds by construction; assert it
        for (const auto& [i, mat] : e.action)
            if (i > t && !mat.is_zero())
                throw internal_error("Tor action violates instability");
    }
    return page;
}

FiniteUnstableModule column_module(const TorPage& page, int s) {
    FiniteUnstableModule::Description d;
    d.name = "Tor^{-" + std::to_string(s) + "}";
    d.dims.assign(static_cast<std::size_t>(page.t_max) + 1, 0);
    for (int t = 0; t <= page.t_max; ++t) {
        d.dims[static_cast<std::size_t>(t)] = page.dim(s, t);
        if (const TorEntry* e = page.entry(s, t))
            for (std::size_t i = 0; i < e->rep_labels.size(); ++i)
                d.labels[{t, i}] = e->rep_labels[i];
    }
    for (int t = 0; t <= page.t_max; ++t) {
        const TorEntry* e = page.entry(s, t);
        if (!e)
            continue;
        for (const auto& [i, mat] : e->action)
            if (t + i <= page.t_max && mat.rows() > 0)
                d.ops[i][t] = mat;
    }
    return FiniteUnstableModule::make(d);
}

std::map<std::pair<int, std::size_t>, nilfilt::NilpotenceCertificate> column_nilpotence(
    const TorPage& page, int s, int dnil, int c_max) {
    const FiniteUnstableModule column = column_module(page, s);
    const auto mod = modules::StructuredModule::finite(column);
    std::map<std::pair<int, std::size_t>, nilfilt::NilpotenceCertificate> out;
    for (int t = 0; t <= page.t_max; ++t) {
        const std::size_t n = column.dim(t);
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = modules::Element::at(t, BitVec::unit(n, i));
            out.emplace(std::make_pair(t, i),
                        nilfilt::nilpotence_degree(mod, x, s * dnil, c_max));
        }
    }
    return out;
}

std::vector<EulerCheck> euler_checks(const FiniteUnstableAlgebra& a, const TorPage& page) {
    std::vector<EulerCheck> out;
    for (int t = 0; t <= page.t_max; ++t) {
        EulerCheck ec{t, 0, 0};
        for (int s = 0; s <= page.s_max; ++s) {
            const long long sign = (s % 2 == 0) ? 1 : -1;
            ec.complex_sum += sign * static_cast<long long>(bar_basis(a.module(), s, t).size());
            ec.homology_sum += sign * static_cast<long long>(page.dim(s, t));
        }
        out.push_back(ec);
    }
    return out;
}

}  // namespace nilops::tor
