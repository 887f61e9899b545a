#ifndef NILOPS_NILFILT_HPP
#define NILOPS_NILFILT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nilops/modules.hpp"

namespace nilops::nilfilt {

using modules::Element;
using modules::FiniteUnstableModule;
using modules::StructuredModule;
using modules::Submodule;

/// One recorded step of a lower-operation chain, for replay.
struct ChainStep {
    int degree;
    gf2::BitVec value;
};

/// Outcome of iterating one Sq_k chain on one element.
struct ChainVerdict {
    enum class Kind { Dies, Survives, Undecided };
    Kind kind = Kind::Undecided;
    int steps = 0;                   // Dies: (Sq_k)^steps x = 0
    std::vector<ChainStep> prefix;   // in-representation steps actually computed
    std::string closed_form_tag;     // Survives beyond the prefix: names the rule
};

ChainVerdict decide_chain(const StructuredModule& m, int k, const Element& x, int c_max);

/// Three-valued nilpotence verdict for one element.
/// - at_least s with per-k witnesses (Sq_k)^{c_k} x = 0 for k < s;
/// - optionally an obstruction showing the element is not s-nilpotent
///   (then the nilpotence degree is pinned exactly when contiguous);
/// - optionally a budget marker when the scan could not decide.
struct NilpotenceCertificate {
    int at_least = 0;
    std::map<int, int> witnesses;  // k -> c with (Sq_k)^c x = 0

    struct Obstruction {
        int s;  // not s-nilpotent
        int k;  // the failing lower operation, k = s-1
        std::vector<ChainStep> prefix;
        std::string closed_form_tag;  // empty when the prefix itself proves it
    };
    std::optional<Obstruction> obstruction;
    std::optional<int> budget_exhausted;  // the c_max that ran out

    bool exact() const { return obstruction && obstruction->s == at_least + 1; }
    bool unknown() const { return budget_exhausted.has_value(); }
    std::string to_string() const;
};

/// Prop-1.4-style criterion scan on one homogeneous element.
NilpotenceCertificate nilpotence_degree(const StructuredModule& m, const Element& x,
                                        int s_max, int c_max);

/// Re-run the chains named by a certificate and confirm the claims.
bool replay_certificate(const StructuredModule& m, const Element& x,
                        const NilpotenceCertificate& cert, int s_max, int c_max);

/// Degreewise basis of the largest s-nilpotent submodule within the bound.
/// `exact` records that the verdict comes from a complete rule (finite
/// shapes, RP-infinity, F(1), one-degree tensor factors), not a bounded
/// search. Throws Budget when an element verdict is undecidable.
struct Layer {
    std::vector<gf2::Span> spans;  // index = degree, 0..degree_bound
    bool exact = true;

    std::size_t dim(int d) const {
        if (d < 0 || d >= static_cast<int>(spans.size()))
            return 0;
        return spans[static_cast<std::size_t>(d)].rank();
    }
};

Layer filtration_layer(const StructuredModule& m, int s, int degree_bound, int c_max);

/// The reduced layer R_s = (s-fold desuspension of) M_s/M_{s+1}, with the
/// induced action, covering R_s degrees 0..degree_bound (the ambient module
/// is consulted up to degree_bound + s). Reducedness of the result is
/// asserted on the degrees whose top squares stay inside the bound.
FiniteUnstableModule rs_layer(const StructuredModule& m, int s, int degree_bound, int c_max);

/// Sq_0 (the top square) is injective in every degree <= degree_bound.
/// Throws Overflow when the shape cannot answer a required degree.
bool is_reduced(const StructuredModule& m, int degree_bound);

/// A monomorphism into a structured module, described by its image:
/// explicit degreewise bases up to data_bound, plus an optional closed-form
/// tail ("the image is the full slice in power-of-two degrees >= 2^j, and
/// zero elsewhere beyond data_bound").
struct InclusionIntoModule {
    StructuredModule target;
    std::map<int, gf2::BitMatrix> image;  // degree -> columns spanning the image
    int data_bound = -1;
    std::optional<int> power_tail_min_exp;
    bool identity = false;  // the identity monomorphism (image = everything)

    explicit InclusionIntoModule(StructuredModule t) : target(std::move(t)) {}

    static InclusionIntoModule identity_on(StructuredModule m);
    static InclusionIntoModule from_spans(StructuredModule m, const std::vector<gf2::Span>& spans,
                                          std::optional<int> power_tail_min_exp = std::nullopt);

    /// Image basis at a degree, nullopt when unknown there.
    std::optional<std::vector<gf2::BitVec>> image_at(int degree) const;
};

enum class Trivalent { Yes, No, Unknown };

struct StrongFIsoResult {
    Trivalent verdict = Trivalent::Unknown;
    std::optional<Element> witness;  // for No: an element with no chain into the image
    std::string note;
};

/// Is the inclusion a strong F-isomorphism: does every nonzero element of
/// the target have a nonzero Sq_0-iterate in the image? Requires the target
/// (and the source, which is a submodule of it) reduced within the bound.
StrongFIsoResult strong_f_iso(const InclusionIntoModule& inc, int degree_bound, int c_max);

/// Per-degree joint kernel of the lower operations Sq_k, 0 <= k <= h, on a
/// finite module, with the submodule (closure) verification.
struct KernelResult {
    Submodule kernel;
    std::vector<std::string> closure_violations;  // the underlying statement proves none
    bool closed() const { return closure_violations.empty(); }
};

KernelResult sq_lower_kernel(const FiniteUnstableModule& m, int h);

/// Degreewise set of x whose Sq_k chains all die for 0 <= k <= h, computed
/// from the eventual kernels alone (no closure applied). That this family
/// is closed under the action is the content of a verified statement; see
/// the law suite.
Submodule eventual_kernel_family(const FiniteUnstableModule& m, int h);

/// Saturation: given reduced H and a submodule J, build H' with
/// H' strongly F-isomorphic to H and (x in H', Sq_0 x in J) => x in J,
/// via the stabilizing chain J_h = {x : Sq_0^h x in J}.
struct SaturationResult {
    Submodule h_prime;     // degreewise spans within the bound
    int stabilized_at;     // the k with J_k = J_{k+1} = ...
    bool checks_passed;    // both output properties re-verified in bound
};

SaturationResult sq0_saturate(const StructuredModule& h, const Submodule& j, int degree_bound,
                              int budget);

/// Full filtration summary used by the CLI: per s the layer dims, the
/// reduced layer dims, and per-element certificate summaries.
struct FiltrationTable {
    int s_max, degree_bound, c_max;
    std::vector<Layer> layers;                         // index s = 0..s_max
    std::vector<std::map<int, std::size_t>> rs_dims;   // index s, degree -> dim
    // (degree, index) -> certificate for the basis element, on the module itself
    std::map<std::pair<int, std::size_t>, NilpotenceCertificate> certificates;
};

FiltrationTable filtration_table(const StructuredModule& m, int s_max, int degree_bound,
                                 int c_max);

}  // namespace nilops::nilfilt

#endif
