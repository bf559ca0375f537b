#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace momentdiv {

/// A real function of the single variable `x`, parsed from the grammar
///
///     expr   := term (('+'|'-') term)*
///     term   := factor (('*'|'/') factor)*
///     factor := atom ('^' factor)?
///     atom   := number | 'x' | func '(' expr ')' | '(' expr ')' | '-' atom
///     func   := exp | log | sqrt | min2 | max2
///
/// `min2` and `max2` take two comma-separated arguments. Unary minus applies
/// to an atom, so `-2^2` is `(-2)^2`.
///
/// Expressions are immutable and cheap to copy (shared tree).
class Expression {
public:
    enum class Kind { constant, affine, tree };

    /// Parses `source`. Throws ParseError with the byte offset on failure.
    static Expression parse(std::string_view source);

    /// A constant function.
    static Expression constant(double value);

    /// Evaluates at `x`. Throws EvalError when an operation leaves its domain.
    double operator()(double x) const;

    /// Fully parenthesized text that re-parses to an equivalent tree.
    std::string to_string() const;

    /// The text this expression was parsed from.
    const std::string& source() const noexcept { return source_; }

    /// Structural classification of the parsed tree.
    Kind kind() const noexcept { return kind_; }

    /// Value of a constant expression (only meaningful when kind() == constant).
    double constant_value() const noexcept { return constant_; }

    struct Node;

private:
    Expression(std::shared_ptr<const Node> root, std::string source);

    std::shared_ptr<const Node> root_;
    std::string source_;
    Kind kind_ = Kind::tree;
    double constant_ = 0.0;
};

}  // namespace momentdiv
