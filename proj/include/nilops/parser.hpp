#ifndef NILOPS_PARSER_HPP
#define NILOPS_PARSER_HPP

#include <string>
#include <variant>

#include "nilops/modules.hpp"
#include "nilops/steenrod.hpp"

namespace nilops::parser {

/// Rejection with a byte position, what was expected there, and the
/// offending fragment.
struct ParseError {
    std::size_t position = 0;
    std::string expected;
    std::string found;

    std::string message() const;
};

class ParseException : public Error {
public:
    explicit ParseException(ParseError e)
        : Error(Error::Kind::Validation, e.message()), error_(std::move(e)) {}
    const ParseError& error() const { return error_; }

private:
    ParseError error_;
};

/// Grammar:
///   expr  := term { "+" term }
///   term  := "1" | sqop { sqop }
///   sqop  := "Sq" integer        (decimal, >= 1; no inner whitespace)
/// Whitespace separates tokens. Throws ParseException on any deviation.
steenrod::Expression parse_op(const std::string& text);

/// Canonical print of a normalized sum ("0" for zero, "1" for the unit).
std::string print_sum(const steenrod::AdmissibleSum& sum);

using LoadedDocument =
    std::variant<modules::FiniteUnstableModule, modules::FiniteUnstableAlgebra>;

/// Load a module/algebra description document (an algebra when "products"
/// is present). Schema violations name the offending field path; the
/// constructor validations run on load and pass through.
LoadedDocument load_document(const std::string& json_text);

/// Canonical serializations; load(save(x)) reproduces x byte-exactly.
std::string save_module(const modules::FiniteUnstableModule& m);
std::string save_algebra(const modules::FiniteUnstableAlgebra& a);

}  // namespace nilops::parser

#endif
