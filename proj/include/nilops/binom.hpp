#ifndef NILOPS_BINOM_HPP
#define NILOPS_BINOM_HPP

#include <cstdint>

namespace nilops {

/// binom(n, k) mod 2 by the Lucas criterion: nonzero iff the bits of k
/// are a subset of the bits of n.
inline int binom_mod2(long long n, long long k) {
    if (k < 0 || n < 0 || k > n)
        return 0;
    return ((static_cast<std::uint64_t>(n) & static_cast<std::uint64_t>(k)) ==
            static_cast<std::uint64_t>(k))
               ? 1
               : 0;
}

}  // namespace nilops

#endif
