#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flashsim {

/// Names an expression may reference.
enum class Variable : std::uint8_t {
    ByteCount,
    PageSize,
    OobSize,
    Channel,
    Chip,
    Die,
    Plane,
    Block,
    Page,
    Duration,
};

inline constexpr std::size_t kVariableCount = 10;

std::string_view to_string(Variable v);
std::optional<Variable> variable_from_string(std::string_view name);

using VariableSet = std::bitset<kVariableCount>;
using VariableValues = std::array<double, kVariableCount>;

VariableSet latency_variables();  // everything except duration
VariableSet power_variables();    // latency variables plus duration
VariableSet idle_variables();     // channel, chip, die, plane, page_size, oob_size

/// A parsed arithmetic expression.
///
/// Grammar (whitespace between tokens is ignored):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | primary
///     primary := number | name | ('min' | 'max') '(' expr (',' expr)+ ')' | '(' expr ')'
///
/// Numbers are decimal with an optional exponent. Evaluation only fails on
/// division by zero.
class Expression {
public:
    /// Throws Error{SyntaxError} or Error{UnknownIdentifier}; the message
    /// carries the 1-based column.
    static Expression parse(std::string_view text, VariableSet allowed = power_variables());

    double evaluate(const VariableValues& values) const;

    const std::string& text() const noexcept { return text_; }
    VariableSet referenced() const noexcept { return referenced_; }

private:
    enum class Op : std::uint8_t { Constant, Load, Add, Sub, Mul, Div, Neg, Min, Max };

    struct Instr {
        Op op;
        double value = 0.0;   // Constant
        std::uint8_t var = 0; // Load
        std::uint8_t arity = 0; // Min / Max
    };

    friend class ExpressionParser;

    std::string text_;
    std::vector<Instr> program_;  // postfix
    VariableSet referenced_;
    std::size_t max_stack_ = 0;
};

}  // namespace flashsim
