#ifndef NILOPS_ERROR_HPP
#define NILOPS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nilops {

/// Library-wide exception. The kind distinguishes contract violations
/// (Validation, Shape), honest resource limits (Budget, Overflow) and
/// engine bugs (Internal) so the CLI can map them to exit codes.
class Error : public std::runtime_error {
public:
    enum class Kind {
        Validation,  // invalid input data (bad module table, ill-posed question)
        Shape,       // dimension / degree mismatch between operands
        Budget,      // iteration or degree budget exhausted before a verdict
        Overflow,    // a bounded representation was asked beyond its bound
        Internal,    // invariant the engine itself guarantees was violated
    };

    Error(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline Error validation_error(const std::string& msg) { return Error(Error::Kind::Validation, msg); }
inline Error shape_error(const std::string& msg) { return Error(Error::Kind::Shape, msg); }
inline Error budget_error(const std::string& msg) { return Error(Error::Kind::Budget, msg); }
inline Error overflow_error(const std::string& msg) { return Error(Error::Kind::Overflow, msg); }
inline Error internal_error(const std::string& msg) { return Error(Error::Kind::Internal, msg); }

}  // namespace nilops

#endif
