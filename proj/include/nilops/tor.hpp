#ifndef NILOPS_TOR_HPP
#define NILOPS_TOR_HPP

#include <map>
#include <string>
#include <vector>

#include "nilops/modules.hpp"
#include "nilops/nilfilt.hpp"

namespace nilops::tor {

using modules::FiniteUnstableAlgebra;
using modules::FiniteUnstableModule;

/// One bigraded slot Tor^{-s,t} with chosen cycle representatives in the
/// reduced bar complex and the induced Steenrod action in homology
/// coordinates.
struct TorEntry {
    int s = 0, t = 0;
    std::size_t dim = 0;
    std::vector<gf2::BitVec> representatives;   // cycles in bar coordinates
    std::vector<std::string> rep_labels;
    std::map<int, gf2::BitMatrix> action;       // Sq^i: (s,t) -> (s,t+i)
    bool action_complete = true;                // false when t_max truncates some Sq^i
};

class TorPage {
public:
    int s_max = 0, t_max = 0;
    std::map<std::pair<int, int>, TorEntry> entries;

    // bookkeeping recorded with the page; the differentials themselves are
    // not computed here
    std::string suspension_convention =
        "column -s carries the s-fold suspension of the filtration quotient F_{-s}/F_{-s+1}";
    std::string differential_shape =
        "d_r: (-s,t) -> (-s-r, t+r-1), degree-zero maps after the suspension shift; not computed";

    const TorEntry* entry(int s, int t) const {
        auto it = entries.find({s, t});
        return it == entries.end() ? nullptr : &it->second;
    }
    std::size_t dim(int s, int t) const {
        const TorEntry* e = entry(s, t);
        return e ? e->dim : 0;
    }
};

/// Homology of the reduced bar complex of the augmentation ideal, one
/// internal degree at a time, with the Cartan-formula Steenrod action
/// computed on representatives and verified to descend.
TorPage bar_tor(const FiniteUnstableAlgebra& a, int s_max, int t_max);

/// Column -s of the page assembled as a finite unstable module in the
/// internal grading (construction re-validates instability and Adem
/// consistency of the induced action).
FiniteUnstableModule column_module(const TorPage& page, int s);

/// Criterion certificates for every class of column -s, which should come
/// out at least s*d-nilpotent when the augmentation ideal is d-nilpotent.
std::map<std::pair<int, std::size_t>, nilfilt::NilpotenceCertificate> column_nilpotence(
    const TorPage& page, int s, int d, int c_max);

/// Internal-degree Euler characteristic of the bar complex vs homology;
/// exposed for rank bookkeeping checks.
struct EulerCheck {
    int t;
    long long complex_sum;   // sum (-1)^s dim B_{s,t}
    long long homology_sum;  // sum (-1)^s dim Tor^{-s,t}
};
std::vector<EulerCheck> euler_checks(const FiniteUnstableAlgebra& a, const TorPage& page);

}  // namespace nilops::tor

#endif
