#ifndef NILOPS_TESTS_FIXTURES_HPP
#define NILOPS_TESTS_FIXTURES_HPP

#include "nilops/modules.hpp"

// Small standard modules and algebras shared across test files.
namespace fixtures {

using nilops::gf2::BitMatrix;
using nilops::gf2::BitVec;
using nilops::modules::FiniteUnstableAlgebra;
using nilops::modules::FiniteUnstableModule;

/// One class in degree s, no action.
inline FiniteUnstableModule sigma_f2(int s) {
    FiniteUnstableModule::Description d;
    d.name = "S^" + std::to_string(s) + "F2";
    d.dims.assign(static_cast<std::size_t>(s) + 1, 0);
    d.dims[static_cast<std::size_t>(s)] = 1;
    return FiniteUnstableModule::make(d);
}

/// Reduced cohomology of RP^2 as a module: x in degree 1, Sq^1 x = x^2.
inline FiniteUnstableModule rp2_module() {
    FiniteUnstableModule::Description d;
    d.name = "H~RP2";
    d.dims = {0, 1, 1};
    BitMatrix sq1(1, 1);
    sq1.set(0, 0, true);
    d.ops[1][1] = sq1;
    d.labels[{1, 0}] = "u";
    d.labels[{2, 0}] = "u^2";
    return FiniteUnstableModule::make(d);
}

/// The truncated polynomial algebra F2[u]/u^4 (cohomology of RP^3).
inline FiniteUnstableAlgebra rp3_algebra() {
    FiniteUnstableAlgebra::Description d;
    d.module.name = "F2[u]/u^4";
    d.module.dims = {1, 1, 1, 1};
    BitMatrix one(1, 1);
    one.set(0, 0, true);
    d.module.ops[1][1] = one;  // Sq1 u = u^2
    // Sq1 u^2 = 0, Sq2 u^2 = u^4 = 0, Sq1 u^3 = binom(3,1) u^4 = 0 in the truncation
    d.module.labels[{0, 0}] = "1";
    d.module.labels[{1, 0}] = "u";
    d.module.labels[{2, 0}] = "u^2";
    d.module.labels[{3, 0}] = "u^3";
    BitVec u2(1), u3(1);
    u2.set(0, true);
    u3.set(0, true);
    d.products[{1, 1}] = {{u2}};
    d.products[{1, 2}] = {{u3}};
    d.products[{2, 1}] = {{u3}};
    return FiniteUnstableAlgebra::make(d);
}

/// Exterior algebra on one degree-3 class (cohomology of S^3).
inline FiniteUnstableAlgebra lambda_x3() {
    FiniteUnstableAlgebra::Description d;
    d.module.name = "Lambda(x3)";
    d.module.dims = {1, 0, 0, 1};
    d.module.labels[{0, 0}] = "1";
    d.module.labels[{3, 0}] = "x3";
    return FiniteUnstableAlgebra::make(d);
}

/// The trivial connected algebra F2.
inline FiniteUnstableAlgebra f2_algebra() {
    FiniteUnstableAlgebra::Description d;
    d.module.name = "F2";
    d.module.dims = {1};
    return FiniteUnstableAlgebra::make(d);
}

}  // namespace fixtures

#endif
