#ifndef NILOPS_MODULES_HPP
#define NILOPS_MODULES_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nilops/gf2.hpp"
#include "nilops/steenrod.hpp"

namespace nilops::modules {

struct ValidationIssue {
    std::string kind;    // "instability", "adem", "shape", "cartan", ...
    std::string detail;  // names the offending degree / operation / basis element
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string to_string() const;
};

/// Graded GF(2) module over the Steenrod algebra, finite over [0, D], with
/// an explicit matrix for every Sq^i (1 <= i <= D). Construction validates
/// instability and Adem consistency and names the witness on failure.
class FiniteUnstableModule {
public:
    struct Description {
        std::string name;
        std::vector<std::size_t> dims;
        // i -> (source degree -> matrix of shape dim(d+i) x dim(d))
        std::map<int, std::map<int, gf2::BitMatrix>> ops;
        std::map<std::pair<int, std::size_t>, std::string> labels;
    };

    static FiniteUnstableModule make(const Description& d);  // throws Validation
    static ValidationReport check(const Description& d);     // batch diagnostic

    const gf2::GradedVectorSpace& space() const { return space_; }
    int top_degree() const { return space_.top_degree(); }
    std::size_t dim(int d) const { return space_.dim(d); }
    const std::string& name() const { return name_; }

    /// The Sq^i action as a graded map of shift i (1 <= i <= top degree).
    const gf2::GradedLinearMap& action(int i) const;

    /// Sq^i applied to a degree-d vector; i = 0 is the identity.
    gf2::BitVec act_sq(int i, int d, const gf2::BitVec& x) const;

    /// Matrix of Sq^i on degree d (zero matrix where no block is stored).
    gf2::BitMatrix sq_block(int i, int d) const;

    Description describe() const;

private:
    gf2::GradedVectorSpace space_;
    std::vector<gf2::GradedLinearMap> actions_;  // [i-1] = Sq^i
    std::string name_;
};

/// Homogeneous-by-degree element container; only nonzero components stored.
struct Element {
    std::map<int, gf2::BitVec> components;

    static Element zero() { return {}; }
    static Element at(int degree, gf2::BitVec v);

    bool is_zero() const;
    /// Zero is homogeneous of every degree; degree_out untouched then.
    bool homogeneous(int* degree_out = nullptr) const;
    gf2::BitVec component(int degree, std::size_t dim) const;

    Element& operator^=(const Element& o);
    bool operator==(const Element& o) const;

    std::string to_string() const;
};

/// Symbolic module built from closed-form constructors. Basis enumeration
/// and the exact Sq^i action are available at every degree the shape can
/// answer; a Free bound overflow is an error, never a silent zero.
class StructuredModule {
public:
    struct FiniteShape {
        std::shared_ptr<const FiniteUnstableModule> m;
    };
    struct FreeShape {
        int n;             // generator degree
        int degree_bound;  // queries beyond this throw Overflow
    };
    struct SuspensionShape {
        std::shared_ptr<const StructuredModule> inner;
        int s;
    };
    struct TensorShape {
        std::shared_ptr<const StructuredModule> left, right;
    };
    struct RPInfinityShape {};  // reduced cohomology of RP^infinity, no bound

    static StructuredModule finite(FiniteUnstableModule m);
    static StructuredModule free(int n, int degree_bound);
    static StructuredModule suspension(StructuredModule inner, int s);  // s >= 1
    static StructuredModule tensor(StructuredModule left, StructuredModule right);
    static StructuredModule rp_infinity();

    const FiniteShape* as_finite() const { return std::get_if<FiniteShape>(&shape_); }
    const FreeShape* as_free() const { return std::get_if<FreeShape>(&shape_); }
    const SuspensionShape* as_suspension() const { return std::get_if<SuspensionShape>(&shape_); }
    const TensorShape* as_tensor() const { return std::get_if<TensorShape>(&shape_); }
    const RPInfinityShape* as_rp_infinity() const { return std::get_if<RPInfinityShape>(&shape_); }

    std::size_t dim(int degree) const;
    std::string label(int degree, std::size_t index) const;

    /// Matrix of Sq^i from degree d to d+i; i = 0 gives the identity.
    gf2::BitMatrix sq_matrix(int i, int d) const;

    /// Natural top degree when the shape is genuinely finite (finite leaves,
    /// suspensions and tensors of those); nullopt otherwise.
    std::optional<int> exact_top() const;

    /// Degreewise truncation: the quotient by everything above the bound,
    /// as an explicit finite module. Exact when bound >= exact_top().
    FiniteUnstableModule materialize(int degree_bound, const std::string& name = "") const;

    std::string describe() const;

private:
    std::variant<FiniteShape, FreeShape, SuspensionShape, TensorShape, RPInfinityShape> shape_;

    explicit StructuredModule(decltype(shape_) s) : shape_(std::move(s)) {}

    /// Free-shape basis at a degree: admissibles of that degree over the
    /// generator with excess <= n.
    std::vector<steenrod::Monomial> free_basis(int degree) const;
};

/// op acted on x, linear in both; monomials act rightmost index first.
Element act(const StructuredModule& m, const steenrod::AdmissibleSum& op, const Element& x);
Element act_sq(const StructuredModule& m, int i, const Element& x);

/// Sq_k x = Sq^{|x|-k} x; zero when k > |x| or k < 0. Throws on
/// non-homogeneous input.
Element sq_lower(const StructuredModule& m, int k, const Element& x);

/// The element x (x) y of a tensor module, given the factor components.
Element tensor_element(const StructuredModule& tensor_mod, int left_degree,
                       const gf2::BitVec& x, int right_degree, const gf2::BitVec& y);

/// Degreewise spans describing a submodule of a finite module.
struct Submodule {
    std::vector<gf2::Span> spans;  // index = degree, ambient dim = module dim

    std::size_t dim(int d) const {
        if (d < 0 || d >= static_cast<int>(spans.size()))
            return 0;
        return spans[static_cast<std::size_t>(d)].rank();
    }
};

Submodule empty_submodule(const FiniteUnstableModule& m);
Submodule full_submodule(const FiniteUnstableModule& m);

/// Smallest action-closed degreewise span containing the generators.
Submodule span_closure(const FiniteUnstableModule& m, const std::vector<Element>& generators);

bool is_action_closed(const FiniteUnstableModule& m, const Submodule& sub);

/// A finite module together with degreewise coordinates into a parent.
struct MappedModule {
    FiniteUnstableModule module;
    std::vector<gf2::BitMatrix> into_parent;  // per degree: module coords -> parent coords
};

/// The submodule as a module of its own (throws unless action-closed).
MappedModule restrict_to(const FiniteUnstableModule& m, const Submodule& sub,
                         const std::string& name);

/// Quotient by an action-closed submodule; into_parent holds chosen lifts.
MappedModule quotient_by(const FiniteUnstableModule& m, const Submodule& sub,
                         const std::string& name);

FiniteUnstableModule direct_sum(const FiniteUnstableModule& a, const FiniteUnstableModule& b,
                                const std::string& name);

/// Commutative unstable algebra on a finite module: bilinear product tables
/// per degree pair, validated for commutativity, associativity, the unit,
/// the Cartan formula and the restriction Sq^{|x|} x = x^2.
class FiniteUnstableAlgebra {
public:
    using ProductTable = std::vector<std::vector<gf2::BitVec>>;  // [a][b] -> value

    struct Description {
        FiniteUnstableModule::Description module;
        std::map<std::pair<int, int>, ProductTable> products;  // positive degrees only
    };

    static FiniteUnstableAlgebra make(const Description& d);  // throws Validation
    static ValidationReport check(const Description& d);

    const FiniteUnstableModule& module() const { return module_; }
    int top_degree() const { return module_.top_degree(); }

    /// Bilinear product; degree-0 factors act as scalars, products beyond
    /// the top degree are zero (truncation quotient semantics).
    gf2::BitVec mul(int d1, const gf2::BitVec& a, int d2, const gf2::BitVec& b) const;

    const std::map<std::pair<int, int>, ProductTable>& products() const { return products_; }

    Description describe() const;

private:
    FiniteUnstableModule module_;
    std::map<std::pair<int, int>, ProductTable> products_;
};

/// Q(A) = positive part modulo products of positive-degree elements, with
/// the induced action (revalidated on construction).
FiniteUnstableModule indecomposables(const FiniteUnstableAlgebra& a);

ValidationReport verify_instability(const FiniteUnstableModule::Description& d);
ValidationReport verify_algebra(const FiniteUnstableAlgebra::Description& d);

}  // namespace nilops::modules

#endif
