#include "flashsim/expression.hpp"

#include "flashsim/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace flashsim {

namespace {

constexpr std::array<std::string_view, kVariableCount> kVariableNames = {
    "byte_count", "page_size", "oob_size", "channel", "chip",
    "die",        "plane",     "block",    "page",    "duration",
};

}  // namespace

std::string_view to_string(Variable v)
{
    return kVariableNames[static_cast<std::size_t>(v)];
}

std::optional<Variable> variable_from_string(std::string_view name)
{
    for (std::size_t i = 0; i < kVariableCount; ++i) {
        if (kVariableNames[i] == name) return static_cast<Variable>(i);
    }
    return std::nullopt;
}

VariableSet latency_variables()
{
    VariableSet s;
    s.set();
    s.reset(static_cast<std::size_t>(Variable::Duration));
    return s;
}

VariableSet power_variables()
{
    VariableSet s;
    s.set();
    return s;
}

VariableSet idle_variables()
{
    VariableSet s;
    for (auto v : {Variable::Channel, Variable::Chip, Variable::Die, Variable::Plane,
                   Variable::PageSize, Variable::OobSize}) {
        s.set(static_cast<std::size_t>(v));
    }
    return s;
}

class ExpressionParser {
public:
    ExpressionParser(std::string_view text, VariableSet allowed, Expression& out)
        : text_(text), allowed_(allowed), out_(out) {}

    void run()
    {
        expr();
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        if (out_.program_.empty()) {
            fail("empty expression");
        }
    }

private:
    using Op = Expression::Op;

    [[noreturn]] void fail(const std::string& what) const
    {
        const std::string where = pos_ >= text_.size()
                                      ? "at end of input"
                                      : "at column " + std::to_string(pos_ + 1);
        throw Error(ErrorCode::SyntaxError, "syntax error " + where + ": " + what);
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    void emit(Expression::Instr in, int stack_delta)
    {
        out_.program_.push_back(in);
        depth_ += stack_delta;
        out_.max_stack_ = std::max(out_.max_stack_, static_cast<std::size_t>(depth_));
    }

    void expr()
    {
        term();
        for (;;) {
            if (accept('+')) {
                term();
                emit({Op::Add}, -1);
            } else if (accept('-')) {
                term();
                emit({Op::Sub}, -1);
            } else {
                return;
            }
        }
    }

    void term()
    {
        unary();
        for (;;) {
            if (accept('*')) {
                unary();
                emit({Op::Mul}, -1);
            } else if (accept('/')) {
                unary();
                emit({Op::Div}, -1);
            } else {
                return;
            }
        }
    }

    void unary()
    {
        if (accept('-')) {
            unary();
            emit({Op::Neg}, 0);
            return;
        }
        primary();
    }

    void primary()
    {
        skip_space();
        if (pos_ >= text_.size()) fail("expected a number, name or '('");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            expr();
            expect(')');
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            name();
            return;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    void number()
    {
        double value = 0.0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
        if (ec != std::errc{}) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - first);
        emit({Op::Constant, value}, +1);
    }

    void name()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view id = text_.substr(start, pos_ - start);
        if (id == "min" || id == "max") {
            expect('(');
            std::uint8_t arity = 1;
            expr();
            while (accept(',')) {
                expr();
                ++arity;
            }
            expect(')');
            if (arity < 2) fail(std::string(id) + " needs at least two arguments");
            Expression::Instr in{id == "min" ? Op::Min : Op::Max};
            in.arity = arity;
            emit(in, 1 - arity);
            return;
        }
        const auto var = variable_from_string(id);
        if (!var || !allowed_.test(static_cast<std::size_t>(*var))) {
            throw Error(ErrorCode::UnknownIdentifier, "unknown identifier '" + std::string(id) +
                                                          "' at column " + std::to_string(start + 1));
        }
        out_.referenced_.set(static_cast<std::size_t>(*var));
        Expression::Instr in{Op::Load};
        in.var = static_cast<std::uint8_t>(*var);
        emit(in, +1);
    }

    std::string_view text_;
    VariableSet allowed_;
    Expression& out_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

Expression Expression::parse(std::string_view text, VariableSet allowed)
{
    Expression e;
    e.text_ = std::string(text);
    ExpressionParser(e.text_, allowed, e).run();
    return e;
}

double Expression::evaluate(const VariableValues& values) const
{
    std::vector<double> stack;
    stack.reserve(max_stack_);
    for (const Instr& in : program_) {
        switch (in.op) {
            case Op::Constant:
                stack.push_back(in.value);
                break;
            case Op::Load:
                stack.push_back(values[in.var]);
                break;
            case Op::Neg:
                stack.back() = -stack.back();
                break;
            case Op::Min:
            case Op::Max: {
                const auto first = stack.end() - in.arity;
                const double r = in.op == Op::Min ? *std::min_element(first, stack.end())
                                                  : *std::max_element(first, stack.end());
                stack.erase(first, stack.end());
                stack.push_back(r);
                break;
            }
            default: {
                const double rhs = stack.back();
                stack.pop_back();
                double& lhs = stack.back();
                switch (in.op) {
                    case Op::Add: lhs += rhs; break;
                    case Op::Sub: lhs -= rhs; break;
                    case Op::Mul: lhs *= rhs; break;
                    case Op::Div:
                        if (rhs == 0.0) {
                            throw Error(ErrorCode::DivisionByZero,
                                        "division by zero in '" + text_ + "'");
                        }
                        lhs /= rhs;
                        break;
                    default: break;
                }
                break;
            }
        }
    }
    return stack.back();
}

}  // namespace flashsim
