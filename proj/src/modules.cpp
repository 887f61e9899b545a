#include "nilops/modules.hpp"

#include <algorithm>
#include <sstream>

#include "nilops/binom.hpp"

namespace nilops::modules {

using gf2::BitMatrix;
using gf2::BitVec;
using steenrod::AdmissibleSum;
using steenrod::Monomial;

std::string ValidationReport::to_string() const {
    if (ok())
        return "valid";
    std::ostringstream os;
    for (const auto& issue : issues)
        os << "[" << issue.kind << "] " << issue.detail << "\n";
    return os.str();
}

namespace {

void check_module_impl(const FiniteUnstableModule::Description& d, ValidationReport& rep) {
    const gf2::GradedVectorSpace space{d.dims};
    const int top = space.top_degree();

    try {
        space.validate();
    } catch (const Error& e) {
        rep.issues.push_back({"shape", e.what()});
    }

    auto dim = [&](int deg) { return space.dim(deg); };

    // shape of provided blocks
    for (const auto& [i, per_degree] : d.ops) {
        if (i < 1) {
            rep.issues.push_back({"shape", "operation key Sq" + std::to_string(i) + " is not >= 1"});
            continue;
        }
        for (const auto& [deg, mat] : per_degree) {
            if (deg < 0 || deg > top || dim(deg) == 0 || deg + i > top) {
                if (mat.rows() != 0 || mat.cols() != 0)
                    rep.issues.push_back({"shape", "Sq" + std::to_string(i) + " has a block at degree " +
                                                       std::to_string(deg) + " where none can live"});
                continue;
            }
            if (mat.rows() != dim(deg + i) || mat.cols() != dim(deg))
                rep.issues.push_back({"shape", "Sq" + std::to_string(i) + " block at degree " +
                                                   std::to_string(deg) + " has shape " +
                                                   std::to_string(mat.rows()) + "x" + std::to_string(mat.cols()) +
                                                   ", expected " + std::to_string(dim(deg + i)) + "x" +
                                                   std::to_string(dim(deg))});
        }
    }
    if (!rep.ok())
        return;  // shape errors make the remaining checks meaningless

    auto block = [&](int i, int deg) -> BitMatrix {
        if (i == 0)
            return BitMatrix::identity(dim(deg));
        auto oit = d.ops.find(i);
        if (oit != d.ops.end()) {
            auto bit = oit->second.find(deg);
            if (bit != oit->second.end() && bit->second.rows() == dim(deg + i))
                return bit->second;
        }
        return BitMatrix(dim(deg + i), dim(deg));
    };

    // instability: Sq^i vanishes on degrees d < i
    for (int i = 1; i <= top; ++i) {
        for (int deg = 0; deg < i && deg + i <= top; ++deg) {
            const BitMatrix b = block(i, deg);
            if (b.is_zero())
                continue;
            for (std::size_t col = 0; col < b.cols(); ++col) {
                if (!b.col(col).is_zero()) {
                    rep.issues.push_back({"instability",
                                          "Sq" + std::to_string(i) + " acts nontrivially on " +
                                              space.label(deg, col) + " of degree " + std::to_string(deg)});
                    break;
                }
            }
        }
    }

    // Adem consistency on every inadmissible pair within range
    for (int b2 = 1; b2 <= top; ++b2) {
        for (int a = 1; a < 2 * b2 && a + b2 <= top; ++a) {
            const AdmissibleSum rhs_sum = steenrod::adem_pair(a, b2);
            for (int deg = 0; deg + a + b2 <= top; ++deg) {
                if (dim(deg) == 0)
                    continue;
                BitMatrix lhs = block(a, deg + b2) * block(b2, deg);
                BitMatrix rhs(dim(deg + a + b2), dim(deg));
                for (const auto& mono : rhs_sum.monomials()) {
                    if (mono.length() == 1)
                        rhs = rhs + block(mono.indices[0], deg);
                    else
                        rhs = rhs + block(mono.indices[0], deg + mono.indices[1]) * block(mono.indices[1], deg);
                }
                if (!(lhs == rhs)) {
                    std::size_t witness = 0;
                    for (std::size_t col = 0; col < lhs.cols(); ++col)
                        if (lhs.col(col) != rhs.col(col)) {
                            witness = col;
                            break;
                        }
                    rep.issues.push_back({"adem",
                                          "Sq" + std::to_string(a) + " Sq" + std::to_string(b2) +
                                              " disagrees with its admissible form on " +
                                              space.label(deg, witness) + " of degree " + std::to_string(deg)});
                }
            }
        }
    }
}

}  // namespace

ValidationReport FiniteUnstableModule::check(const Description& d) {
    ValidationReport rep;
    check_module_impl(d, rep);
    return rep;
}

FiniteUnstableModule FiniteUnstableModule::make(const Description& d) {
    ValidationReport rep = check(d);
    if (!rep.ok())
        throw validation_error("invalid module '" + d.name + "':\n" + rep.to_string());

    FiniteUnstableModule m;
    m.space_ = gf2::GradedVectorSpace{d.dims};
    m.space_.labels = d.labels;
    m.name_ = d.name;
    const int top = m.space_.top_degree();
    for (int i = 1; i <= top; ++i) {
        gf2::GradedLinearMap map;
        map.source = m.space_;
        map.target = m.space_;
        map.shift = i;
        for (int deg = 0; deg + i <= top; ++deg) {
            if (m.space_.dim(deg) == 0)
                continue;
            BitMatrix blockmat(m.space_.dim(deg + i), m.space_.dim(deg));
            if (auto oit = d.ops.find(i); oit != d.ops.end())
                if (auto bit = oit->second.find(deg); bit != oit->second.end())
                    blockmat = bit->second;
            map.blocks.emplace(deg, std::move(blockmat));
        }
        m.actions_.push_back(std::move(map));
    }
    return m;
}

const gf2::GradedLinearMap& FiniteUnstableModule::action(int i) const {
    if (i < 1 || i > top_degree())
        throw shape_error("action: Sq" + std::to_string(i) + " is not stored for top degree " +
                          std::to_string(top_degree()));
    return actions_[static_cast<std::size_t>(i - 1)];
}

BitVec FiniteUnstableModule::act_sq(int i, int d, const BitVec& x) const {
    if (i < 0)
        throw shape_error("act_sq: negative operation index");
    if (x.size() != dim(d))
        throw shape_error("act_sq: vector has wrong dimension at degree " + std::to_string(d));
    if (i == 0)
        return x;
    if (i > top_degree() || d + i > top_degree())
        return BitVec(0);  // target space is zero
    return action(i).apply(d, x);
}

BitMatrix FiniteUnstableModule::sq_block(int i, int d) const {
    if (i == 0)
        return BitMatrix::identity(dim(d));
    if (i < 0)
        throw shape_error("sq_block: negative operation index");
    if (i > top_degree() || d < 0 || d + i > top_degree())
        return BitMatrix(dim(d + i), dim(d));
    return action(i).block_or_zero(d);
}

FiniteUnstableModule::Description FiniteUnstableModule::describe() const {
    Description d;
    d.name = name_;
    d.dims = space_.dims;
    d.labels = space_.labels;
    for (int i = 1; i <= top_degree(); ++i)
        for (const auto& [deg, mat] : action(i).blocks)
            d.ops[i][deg] = mat;
    return d;
}

Element Element::at(int degree, BitVec v) {
    Element e;
    if (!v.is_zero())
        e.components.emplace(degree, std::move(v));
    return e;
}

bool Element::is_zero() const {
    for (const auto& [deg, v] : components)
        if (!v.is_zero())
            return false;
    return true;
}

bool Element::homogeneous(int* degree_out) const {
    int found = -1;
    for (const auto& [deg, v] : components) {
        if (v.is_zero())
            continue;
        if (found >= 0)
            return false;
        found = deg;
    }
    if (found >= 0 && degree_out)
        *degree_out = found;
    return true;
}

BitVec Element::component(int degree, std::size_t dim) const {
    auto it = components.find(degree);
    if (it == components.end())
        return BitVec(dim);
    if (it->second.size() != dim)
        throw shape_error("element component has wrong dimension at degree " + std::to_string(degree));
    return it->second;
}

Element& Element::operator^=(const Element& o) {
    for (const auto& [deg, v] : o.components) {
        auto it = components.find(deg);
        if (it == components.end()) {
            components.emplace(deg, v);
        } else {
            it->second ^= v;
            if (it->second.is_zero())
                components.erase(it);
        }
    }
    return *this;
}

bool Element::operator==(const Element& o) const {
    Element diff = *this;
    diff ^= o;
    return diff.is_zero();
}

std::string Element::to_string() const {
    if (is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [deg, v] : components) {
        if (v.is_zero())
            continue;
        if (!first)
            os << " + ";
        os << deg << ":" << v.to_string();
        first = false;
    }
    return os.str();
}

StructuredModule StructuredModule::finite(FiniteUnstableModule m) {
    return StructuredModule(FiniteShape{std::make_shared<const FiniteUnstableModule>(std::move(m))});
}

StructuredModule StructuredModule::free(int n, int degree_bound) {
    if (n < 0)
        throw shape_error("free module generator degree must be >= 0");
    if (degree_bound < n)
        throw shape_error("free module bound below its generator degree");
    return StructuredModule(FreeShape{n, degree_bound});
}

StructuredModule StructuredModule::suspension(StructuredModule inner, int s) {
    if (s < 1)
        throw shape_error("suspension requires s >= 1");
    return StructuredModule(SuspensionShape{std::make_shared<const StructuredModule>(std::move(inner)), s});
}

StructuredModule StructuredModule::tensor(StructuredModule left, StructuredModule right) {
    return StructuredModule(TensorShape{std::make_shared<const StructuredModule>(std::move(left)),
                                        std::make_shared<const StructuredModule>(std::move(right))});
}

StructuredModule StructuredModule::rp_infinity() {
    return StructuredModule(RPInfinityShape{});
}

std::vector<Monomial> StructuredModule::free_basis(int degree) const {
    const auto& f = std::get<FreeShape>(shape_);
    std::vector<Monomial> out;
    if (degree < f.n)
        return out;
    for (const auto& m : steenrod::full_basis(degree - f.n))
        if (m.excess() <= f.n)
            out.push_back(m);
    return out;
}

std::size_t StructuredModule::dim(int degree) const {
    if (degree < 0)
        return 0;
    if (auto* f = as_finite())
        return f->m->dim(degree);
    if (auto* fr = as_free()) {
        if (degree > fr->degree_bound)
            throw overflow_error("free module F(" + std::to_string(fr->n) + ") queried at degree " +
                                 std::to_string(degree) + " beyond its bound " +
                                 std::to_string(fr->degree_bound));
        return free_basis(degree).size();
    }
    if (auto* s = as_suspension())
        return s->inner->dim(degree - s->s);
    if (auto* t = as_tensor()) {
        std::size_t n = 0;
        for (int d1 = 0; d1 <= degree; ++d1) {
            const std::size_t dl = t->left->dim(d1);
            if (dl == 0)
                continue;
            n += dl * t->right->dim(degree - d1);
        }
        return n;
    }
    return degree >= 1 ? 1 : 0;  // RP-infinity
}

std::string StructuredModule::label(int degree, std::size_t index) const {
    if (auto* f = as_finite())
        return f->m->space().label(degree, index);
    if (auto* fr = as_free()) {
        const auto basis = free_basis(degree);
        const Monomial& m = basis.at(index);
        const std::string gen = "i" + std::to_string(fr->n);
        return m.is_unit() ? gen : m.to_string() + " " + gen;
    }
    if (auto* s = as_suspension())
        return "s" + std::to_string(s->s) + "(" + s->inner->label(degree - s->s, index) + ")";
    if (auto* t = as_tensor()) {
        std::size_t rest = index;
        for (int d1 = 0; d1 <= degree; ++d1) {
            const std::size_t dl = t->left->dim(d1);
            if (dl == 0)
                continue;
            const std::size_t dr = t->right->dim(degree - d1);
            if (rest < dl * dr)
                return "(" + t->left->label(d1, rest / dr) + ")(x)(" +
                       t->right->label(degree - d1, rest % dr) + ")";
            rest -= dl * dr;
        }
        throw shape_error("tensor label index out of range");
    }
    return "u^" + std::to_string(degree);
}

BitMatrix StructuredModule::sq_matrix(int i, int d) const {
    if (i < 0)
        throw shape_error("sq_matrix: negative operation index");
    if (i == 0)
        return BitMatrix::identity(dim(d));
    if (auto* f = as_finite())
        return f->m->sq_block(i, d);
    if (auto* fr = as_free()) {
        const auto src = free_basis(d);
        if (d + i > fr->degree_bound)
            throw overflow_error("free module F(" + std::to_string(fr->n) + ") action Sq" +
                                 std::to_string(i) + " leaves degree bound " +
                                 std::to_string(fr->degree_bound) + " from degree " + std::to_string(d));
        const auto dst = free_basis(d + i);
        BitMatrix out(dst.size(), src.size());
        for (std::size_t c = 0; c < src.size(); ++c) {
            const AdmissibleSum image =
                steenrod::multiply(AdmissibleSum::sq(i), AdmissibleSum::of(src[c]));
            for (const auto& mono : image.monomials()) {
                if (mono.excess() > fr->n)
                    continue;  // zero in F(n)
                const auto it = std::lower_bound(dst.begin(), dst.end(), mono);
                if (it == dst.end() || !(*it == mono))
                    throw internal_error("free module action left its own basis");
                out.set(static_cast<std::size_t>(it - dst.begin()), c, true);
            }
        }
        return out;
    }
    if (auto* s = as_suspension())
        return s->inner->sq_matrix(i, d - s->s);
    if (auto* t = as_tensor()) {
        // Cartan: Sq^i (x (x) y) = sum_j Sq^j x (x) Sq^{i-j} y
        struct SplitInfo {
            int d1;
            std::size_t dl, dr, offset;
        };
        auto splits = [&](int degree) {
            std::vector<SplitInfo> v;
            std::size_t off = 0;
            for (int d1 = 0; d1 <= degree; ++d1) {
                const std::size_t dl = t->left->dim(d1);
                if (dl == 0)
                    continue;
                const std::size_t dr = t->right->dim(degree - d1);
                if (dr == 0)
                    continue;
                v.push_back({d1, dl, dr, off});
                off += dl * dr;
            }
            return v;
        };
        const auto src_splits = splits(d);
        const auto dst_splits = splits(d + i);
        BitMatrix out(dim(d + i), dim(d));
        for (const auto& ss : src_splits) {
            const int d2 = d - ss.d1;
            for (int j = 0; j <= i; ++j) {
                const BitMatrix lm = t->left->sq_matrix(j, ss.d1);
                if (lm.rows() == 0 || lm.is_zero())
                    continue;
                const BitMatrix rm = t->right->sq_matrix(i - j, d2);
                if (rm.rows() == 0 || rm.is_zero())
                    continue;
                const auto dit = std::find_if(dst_splits.begin(), dst_splits.end(),
                                              [&](const SplitInfo& x) { return x.d1 == ss.d1 + j; });
                if (dit == dst_splits.end())
                    continue;
                for (std::size_t a = 0; a < ss.dl; ++a)
                    for (std::size_t b = 0; b < ss.dr; ++b) {
                        const std::size_t col = ss.offset + a * ss.dr + b;
                        for (std::size_t ra = 0; ra < lm.rows(); ++ra) {
                            if (!lm.get(ra, a))
                                continue;
                            for (std::size_t rb = 0; rb < rm.rows(); ++rb) {
                                if (!rm.get(rb, b))
                                    continue;
                                const std::size_t row = dit->offset + ra * dit->dr + rb;
                                out.set(row, col, !out.get(row, col));
                            }
                        }
                    }
            }
        }
        return out;
    }
    // RP-infinity: Sq^i u^d = binom(d, i) u^{d+i}
    BitMatrix out(dim(d + i), dim(d));
    if (d >= 1 && binom_mod2(d, i))
        out.set(0, 0, true);
    return out;
}

std::optional<int> StructuredModule::exact_top() const {
    if (auto* f = as_finite())
        return f->m->top_degree();
    if (auto* s = as_suspension()) {
        auto t = s->inner->exact_top();
        if (t)
            return *t + s->s;
        return std::nullopt;
    }
    if (auto* t = as_tensor()) {
        auto a = t->left->exact_top(), b = t->right->exact_top();
        if (a && b)
            return *a + *b;
        return std::nullopt;
    }
    return std::nullopt;
}

FiniteUnstableModule StructuredModule::materialize(int degree_bound, const std::string& name) const {
    if (degree_bound < 0)
        throw shape_error("materialize: negative bound");
    if (auto t = exact_top())
        degree_bound = std::min(degree_bound, *t);
    FiniteUnstableModule::Description d;
    d.name = name.empty() ? describe() + " (up to degree " + std::to_string(degree_bound) + ")" : name;
    for (int deg = 0; deg <= degree_bound; ++deg) {
        const std::size_t n = dim(deg);
        d.dims.push_back(n);
        for (std::size_t idx = 0; idx < n; ++idx)
            d.labels[{deg, idx}] = label(deg, idx);
    }
    for (int i = 1; i <= degree_bound; ++i)
        for (int deg = 0; deg + i <= degree_bound; ++deg)
            if (dim(deg) > 0 && dim(deg + i) > 0)
                d.ops[i][deg] = sq_matrix(i, deg);
    return FiniteUnstableModule::make(d);
}

std::string StructuredModule::describe() const {
    if (auto* f = as_finite())
        return f->m->name().empty() ? "finite" : f->m->name();
    if (auto* fr = as_free())
        return "F(" + std::to_string(fr->n) + ")<=" + std::to_string(fr->degree_bound);
    if (auto* s = as_suspension())
        return "S^" + std::to_string(s->s) + "(" + s->inner->describe() + ")";
    if (auto* t = as_tensor())
        return "(" + t->left->describe() + ")(x)(" + t->right->describe() + ")";
    return "RP";
}

Element act_sq(const StructuredModule& m, int i, const Element& x) {
    Element out;
    for (const auto& [deg, v] : x.components) {
        if (v.size() != m.dim(deg))
            throw shape_error("act: element does not belong to the module at degree " +
                              std::to_string(deg));
        if (v.is_zero())
            continue;
        if (i == 0) {
            out ^= Element::at(deg, v);
            continue;
        }
        out ^= Element::at(deg + i, m.sq_matrix(i, deg).apply(v));
    }
    return out;
}

Element act(const StructuredModule& m, const AdmissibleSum& op, const Element& x) {
    Element out;
    for (const auto& mono : op.monomials()) {
        Element cur = x;
        for (auto it = mono.indices.rbegin(); it != mono.indices.rend(); ++it)
            cur = act_sq(m, *it, cur);
        out ^= cur;
    }
    return out;
}

Element sq_lower(const StructuredModule& m, int k, const Element& x) {
    if (x.is_zero())
        return Element::zero();
    int deg = 0;
    if (!x.homogeneous(&deg))
        throw shape_error("sq_lower requires a homogeneous element");
    if (k < 0 || k > deg)
        return Element::zero();
    return act_sq(m, deg - k, x);
}

Element tensor_element(const StructuredModule& tensor_mod, int left_degree, const BitVec& x,
                       int right_degree, const BitVec& y) {
    const auto* t = tensor_mod.as_tensor();
    if (!t)
        throw shape_error("tensor_element: the module is not a tensor");
    if (x.size() != t->left->dim(left_degree) || y.size() != t->right->dim(right_degree))
        throw shape_error("tensor_element: factor dimensions do not match");
    const int degree = left_degree + right_degree;
    BitVec out(tensor_mod.dim(degree));
    std::size_t offset = 0;
    for (int d1 = 0; d1 <= degree; ++d1) {
        const std::size_t dl = t->left->dim(d1);
        if (dl == 0)
            continue;
        const std::size_t dr = t->right->dim(degree - d1);
        if (d1 == left_degree) {
            x.for_each_set([&](std::size_t a) {
                y.for_each_set([&](std::size_t b) { out.flip(offset + a * dr + b); });
            });
        }
        offset += dl * dr;
    }
    return Element::at(degree, out);
}

Submodule empty_submodule(const FiniteUnstableModule& m) {
    Submodule s;
    for (int d = 0; d <= m.top_degree(); ++d)
        s.spans.emplace_back(m.dim(d));
    return s;
}

Submodule full_submodule(const FiniteUnstableModule& m) {
    Submodule s = empty_submodule(m);
    for (int d = 0; d <= m.top_degree(); ++d)
        for (std::size_t i = 0; i < m.dim(d); ++i)
            s.spans[static_cast<std::size_t>(d)].insert(BitVec::unit(m.dim(d), i));
    return s;
}

Submodule span_closure(const FiniteUnstableModule& m, const std::vector<Element>& generators) {
    Submodule s = empty_submodule(m);
    for (const auto& g : generators)
        for (const auto& [deg, v] : g.components) {
            if (deg < 0 || deg > m.top_degree() || v.size() != m.dim(deg))
                throw shape_error("span_closure: generator outside the module");
            s.spans[static_cast<std::size_t>(deg)].insert(v);
        }
    bool changed = true;
    while (changed) {
        changed = false;
        for (int d = 0; d <= m.top_degree(); ++d) {
            const auto basis = s.spans[static_cast<std::size_t>(d)].basis();  // copy: spans mutate
            for (const auto& v : basis)
                for (int i = 1; d + i <= m.top_degree(); ++i) {
                    const BitVec w = m.act_sq(i, d, v);
                    if (!w.is_zero() && s.spans[static_cast<std::size_t>(d + i)].insert(w))
                        changed = true;
                }
        }
    }
    return s;
}

bool is_action_closed(const FiniteUnstableModule& m, const Submodule& sub) {
    for (int d = 0; d <= m.top_degree(); ++d)
        for (const auto& v : sub.spans[static_cast<std::size_t>(d)].basis())
            for (int i = 1; d + i <= m.top_degree(); ++i) {
                const BitVec w = m.act_sq(i, d, v);
                if (!w.is_zero() && !sub.spans[static_cast<std::size_t>(d + i)].contains(w))
                    return false;
            }
    return true;
}

MappedModule restrict_to(const FiniteUnstableModule& m, const Submodule& sub,
                         const std::string& name) {
    if (!is_action_closed(m, sub))
        throw validation_error("restrict_to: the given spans are not action-closed");
    FiniteUnstableModule::Description d;
    d.name = name;
    std::vector<gf2::BitMatrix> incl;
    for (int deg = 0; deg <= m.top_degree(); ++deg) {
        const auto& span = sub.spans[static_cast<std::size_t>(deg)];
        d.dims.push_back(span.rank());
        incl.push_back(BitMatrix::from_cols(span.basis(), m.dim(deg)));
    }
    for (int i = 1; i <= m.top_degree(); ++i)
        for (int deg = 0; deg + i <= m.top_degree(); ++deg) {
            const auto& src = sub.spans[static_cast<std::size_t>(deg)];
            const auto& dst = sub.spans[static_cast<std::size_t>(deg + i)];
            if (src.rank() == 0 || dst.rank() == 0)
                continue;
            BitMatrix mat(dst.rank(), src.rank());
            for (std::size_t c = 0; c < src.rank(); ++c) {
                const BitVec w = m.act_sq(i, deg, src.basis()[c]);
                dst.coordinates(w).for_each_set([&](std::size_t r) { mat.set(r, c, true); });
            }
            d.ops[i][deg] = std::move(mat);
        }
    return MappedModule{FiniteUnstableModule::make(d), std::move(incl)};
}

MappedModule quotient_by(const FiniteUnstableModule& m, const Submodule& sub,
                         const std::string& name) {
    if (!is_action_closed(m, sub))
        throw validation_error("quotient_by: the given spans are not action-closed");
    std::vector<gf2::Subquotient> sq;
    for (int deg = 0; deg <= m.top_degree(); ++deg) {
        std::vector<BitVec> gens;
        for (std::size_t i = 0; i < m.dim(deg); ++i)
            gens.push_back(BitVec::unit(m.dim(deg), i));
        sq.emplace_back(m.dim(deg), gens, sub.spans[static_cast<std::size_t>(deg)].basis());
    }
    FiniteUnstableModule::Description d;
    d.name = name;
    std::vector<gf2::BitMatrix> lifts;
    for (int deg = 0; deg <= m.top_degree(); ++deg) {
        const auto& q = sq[static_cast<std::size_t>(deg)];
        d.dims.push_back(q.dim());
        std::vector<BitVec> reps;
        for (std::size_t i = 0; i < q.dim(); ++i)
            reps.push_back(q.representative(i));
        lifts.push_back(BitMatrix::from_cols(reps, m.dim(deg)));
    }
    for (int i = 1; i <= m.top_degree(); ++i)
        for (int deg = 0; deg + i <= m.top_degree(); ++deg) {
            const auto& src = sq[static_cast<std::size_t>(deg)];
            const auto& dst = sq[static_cast<std::size_t>(deg + i)];
            if (src.dim() == 0 || dst.dim() == 0)
                continue;
            BitMatrix mat(dst.dim(), src.dim());
            for (std::size_t c = 0; c < src.dim(); ++c) {
                const BitVec w = m.act_sq(i, deg, src.representative(c));
                dst.project(w).for_each_set([&](std::size_t r) { mat.set(r, c, true); });
            }
            d.ops[i][deg] = std::move(mat);
        }
    return MappedModule{FiniteUnstableModule::make(d), std::move(lifts)};
}

FiniteUnstableModule direct_sum(const FiniteUnstableModule& a, const FiniteUnstableModule& b,
                                const std::string& name) {
    FiniteUnstableModule::Description d;
    d.name = name;
    const int top = std::max(a.top_degree(), b.top_degree());
    for (int deg = 0; deg <= top; ++deg)
        d.dims.push_back(a.dim(deg) + b.dim(deg));
    for (int i = 1; i <= top; ++i)
        for (int deg = 0; deg + i <= top; ++deg) {
            if (d.dims[static_cast<std::size_t>(deg)] == 0)
                continue;
            BitMatrix mat(d.dims[static_cast<std::size_t>(deg + i)], d.dims[static_cast<std::size_t>(deg)]);
            const BitMatrix ba = a.sq_block(i, deg), bb = b.sq_block(i, deg);
            for (std::size_t r = 0; r < ba.rows(); ++r)
                for (std::size_t c = 0; c < ba.cols(); ++c)
                    if (ba.get(r, c))
                        mat.set(r, c, true);
            for (std::size_t r = 0; r < bb.rows(); ++r)
                for (std::size_t c = 0; c < bb.cols(); ++c)
                    if (bb.get(r, c))
                        mat.set(r + ba.rows(), c + ba.cols(), true);
            d.ops[i][deg] = std::move(mat);
        }
    return FiniteUnstableModule::make(d);
}

namespace {

void check_algebra_impl(const FiniteUnstableAlgebra::Description& d, ValidationReport& rep) {
    check_module_impl(d.module, rep);
    if (!rep.ok())
        return;
    const gf2::GradedVectorSpace space{d.module.dims};
    const int top = space.top_degree();
    auto dim = [&](int deg) { return space.dim(deg); };

    if (dim(0) != 1) {
        rep.issues.push_back({"unit", "an unstable algebra here is connected: dim in degree 0 must be 1"});
        return;
    }

    // table shapes
    for (const auto& [key, table] : d.products) {
        const auto& [d1, d2] = key;
        if (d1 < 1 || d2 < 1 || d1 + d2 > top) {
            rep.issues.push_back({"shape", "product table (" + std::to_string(d1) + "," +
                                               std::to_string(d2) + ") is out of range"});
            continue;
        }
        if (table.size() != dim(d1)) {
            rep.issues.push_back({"shape", "product table (" + std::to_string(d1) + "," +
                                               std::to_string(d2) + ") has wrong row count"});
            continue;
        }
        for (const auto& row : table) {
            if (row.size() != dim(d2)) {
                rep.issues.push_back({"shape", "product table (" + std::to_string(d1) + "," +
                                                   std::to_string(d2) + ") has wrong column count"});
                break;
            }
            for (const auto& v : row)
                if (v.size() != dim(d1 + d2)) {
                    rep.issues.push_back({"shape", "product table (" + std::to_string(d1) + "," +
                                                       std::to_string(d2) + ") has wrong value size"});
                    break;
                }
        }
    }
    if (!rep.ok())
        return;

    auto module = FiniteUnstableModule::make(d.module);
    auto table_mul = [&](int d1, std::size_t a, int d2, std::size_t b) -> BitVec {
        auto it = d.products.find({d1, d2});
        if (it == d.products.end())
            return BitVec(dim(d1 + d2));
        return it->second[a][b];
    };
    auto mul_vec = [&](int d1, const BitVec& x, int d2, const BitVec& y) -> BitVec {
        if (d1 == 0)
            return x.get(0) ? y : BitVec(y.size());
        if (d2 == 0)
            return y.get(0) ? x : BitVec(x.size());
        BitVec out(dim(d1 + d2));
        if (d1 + d2 > top)
            return BitVec(0);
        x.for_each_set([&](std::size_t a) {
            y.for_each_set([&](std::size_t b) { out ^= table_mul(d1, a, d2, b); });
        });
        return out;
    };

    // commutativity
    for (int d1 = 1; d1 <= top; ++d1)
        for (int d2 = d1; d1 + d2 <= top; ++d2)
            for (std::size_t a = 0; a < dim(d1); ++a)
                for (std::size_t b = 0; b < dim(d2); ++b)
                    if (table_mul(d1, a, d2, b) != table_mul(d2, b, d1, a)) {
                        rep.issues.push_back({"commutativity",
                                              space.label(d1, a) + " * " + space.label(d2, b) +
                                                  " differs from the transposed product"});
                    }

    // associativity
    for (int d1 = 1; d1 <= top; ++d1)
        for (int d2 = 1; d1 + d2 <= top; ++d2)
            for (int d3 = 1; d1 + d2 + d3 <= top; ++d3)
                for (std::size_t a = 0; a < dim(d1); ++a)
                    for (std::size_t b = 0; b < dim(d2); ++b)
                        for (std::size_t c = 0; c < dim(d3); ++c) {
                            const BitVec lhs = mul_vec(d1 + d2, table_mul(d1, a, d2, b), d3,
                                                       BitVec::unit(dim(d3), c));
                            const BitVec rhs = mul_vec(d1, BitVec::unit(dim(d1), a), d2 + d3,
                                                       table_mul(d2, b, d3, c));
                            if (lhs != rhs)
                                rep.issues.push_back({"associativity",
                                                      "(" + space.label(d1, a) + " " + space.label(d2, b) +
                                                          ") " + space.label(d3, c) + " differs from the right-associated product"});
                        }

    // Cartan formula on the table entries
    for (int d1 = 1; d1 <= top; ++d1)
        for (int d2 = 1; d1 + d2 <= top; ++d2)
            for (int i = 1; d1 + d2 + i <= top; ++i)
                for (std::size_t a = 0; a < dim(d1); ++a)
                    for (std::size_t b = 0; b < dim(d2); ++b) {
                        const BitVec lhs = module.act_sq(i, d1 + d2, table_mul(d1, a, d2, b));
                        BitVec rhs(dim(d1 + d2 + i));
                        for (int j = 0; j <= i; ++j) {
                            const BitVec xa = module.act_sq(j, d1, BitVec::unit(dim(d1), a));
                            const BitVec xb = module.act_sq(i - j, d2, BitVec::unit(dim(d2), b));
                            rhs ^= mul_vec(d1 + j, xa, d2 + i - j, xb);
                        }
                        if (lhs != rhs)
                            rep.issues.push_back({"cartan",
                                                  "Sq" + std::to_string(i) + " on " + space.label(d1, a) +
                                                      " * " + space.label(d2, b) + " violates the Cartan formula"});
                    }

    // restriction: Sq^{|x|} x = x^2
    for (int deg = 1; 2 * deg <= top; ++deg)
        for (std::size_t a = 0; a < dim(deg); ++a) {
            const BitVec lhs = module.act_sq(deg, deg, BitVec::unit(dim(deg), a));
            const BitVec rhs = table_mul(deg, a, deg, a);
            if (lhs != rhs)
                rep.issues.push_back({"restriction",
                                      "Sq" + std::to_string(deg) + " " + space.label(deg, a) +
                                          " differs from the cup square"});
        }
}

}  // namespace

ValidationReport FiniteUnstableAlgebra::check(const Description& d) {
    ValidationReport rep;
    check_algebra_impl(d, rep);
    return rep;
}

FiniteUnstableAlgebra FiniteUnstableAlgebra::make(const Description& d) {
    ValidationReport rep = check(d);
    if (!rep.ok())
        throw validation_error("invalid algebra '" + d.module.name + "':\n" + rep.to_string());
    FiniteUnstableAlgebra a;
    a.module_ = FiniteUnstableModule::make(d.module);
    const int top = a.module_.top_degree();
    // store effective tables for every in-range pair (zero where omitted)
    for (int d1 = 1; d1 <= top; ++d1)
        for (int d2 = 1; d1 + d2 <= top; ++d2) {
            if (a.module_.dim(d1) == 0 || a.module_.dim(d2) == 0)
                continue;
            ProductTable table(a.module_.dim(d1),
                               std::vector<BitVec>(a.module_.dim(d2), BitVec(a.module_.dim(d1 + d2))));
            if (auto it = d.products.find({d1, d2}); it != d.products.end())
                table = it->second;
            a.products_.emplace(std::make_pair(d1, d2), std::move(table));
        }
    return a;
}

BitVec FiniteUnstableAlgebra::mul(int d1, const BitVec& a, int d2, const BitVec& b) const {
    if (a.size() != module_.dim(d1) || b.size() != module_.dim(d2))
        throw shape_error("algebra mul: operand dimension mismatch");
    if (d1 == 0)
        return a.get(0) ? b : BitVec(b.size());
    if (d2 == 0)
        return b.get(0) ? a : BitVec(a.size());
    if (d1 + d2 > module_.top_degree())
        return BitVec(module_.dim(d1 + d2));  // zero beyond the top (dim 0 there)
    BitVec out(module_.dim(d1 + d2));
    auto it = products_.find({d1, d2});
    if (it == products_.end())
        return out;
    a.for_each_set([&](std::size_t x) {
        b.for_each_set([&](std::size_t y) { out ^= it->second[x][y]; });
    });
    return out;
}

FiniteUnstableAlgebra::Description FiniteUnstableAlgebra::describe() const {
    Description d;
    d.module = module_.describe();
    d.products = products_;
    return d;
}

FiniteUnstableModule indecomposables(const FiniteUnstableAlgebra& a) {
    const FiniteUnstableModule& m = a.module();
    const int top = m.top_degree();
    Submodule decomposables = empty_submodule(m);
    for (int d1 = 1; d1 <= top; ++d1)
        for (int d2 = 1; d1 + d2 <= top; ++d2)
            for (std::size_t x = 0; x < m.dim(d1); ++x)
                for (std::size_t y = 0; y < m.dim(d2); ++y)
                    decomposables.spans[static_cast<std::size_t>(d1 + d2)].insert(
                        a.mul(d1, BitVec::unit(m.dim(d1), x), d2, BitVec::unit(m.dim(d2), y)));
    // the degree-0 line is not part of the reduced algebra
    decomposables.spans[0].insert(BitVec::unit(m.dim(0), 0));
    MappedModule q = quotient_by(m, decomposables, "Q(" + m.name() + ")");
    return std::move(q.module);
}

ValidationReport verify_instability(const FiniteUnstableModule::Description& d) {
    return FiniteUnstableModule::check(d);
}

ValidationReport verify_algebra(const FiniteUnstableAlgebra::Description& d) {
    return FiniteUnstableAlgebra::check(d);
}

}  // namespace nilops::modules
