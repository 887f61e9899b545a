#ifndef NILOPS_TESTS_RNG_HPP
#define NILOPS_TESTS_RNG_HPP

#include <cstdint>
#include <random>

namespace testsupport {

// mt19937_64 is pinned by the standard; bounded draws avoid
// std::uniform_int_distribution, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // uniform-ish in [0, n); the modulo bias is irrelevant for test data
    std::uint64_t below(std::uint64_t n) { return n ? engine_() % n : 0; }

    int range(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return engine_() & 1; }

private:
    std::mt19937_64 engine_;
};

}  // namespace testsupport

#endif
