#pragma once

// Scalar expressions in a single variable x: constants, x, +, -, *, /,
// and integer powers. Supports evaluation and analytic differentiation.

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace phsdecay {

class Expression {
public:
    using Ptr = std::shared_ptr<const Expression>;

    virtual ~Expression() = default;
    virtual double eval(double x) const = 0;
    virtual Ptr derivative() const = 0;
    virtual std::string str() const = 0;
};

namespace detail {

class Constant final : public Expression {
public:
    explicit Constant(double v) : value_(v) {}
    double eval(double) const override { return value_; }
    Ptr derivative() const override { return std::make_shared<Constant>(0.0); }
    std::string str() const override {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", value_);
        return buf;
    }
    double value() const { return value_; }

private:
    double value_;
};

class Variable final : public Expression {
public:
    double eval(double x) const override { return x; }
    Ptr derivative() const override { return std::make_shared<Constant>(1.0); }
    std::string str() const override { return "x"; }
};

class Binary final : public Expression {
public:
    Binary(char op, Ptr lhs, Ptr rhs)
        : op_(op), lhs_(std::move(lhs)), rhs_(std::move(rhs)) {}

    double eval(double x) const override {
        const double l = lhs_->eval(x);
        const double r = rhs_->eval(x);
        switch (op_) {
            case '+': return l + r;
            case '-': return l - r;
            case '*': return l * r;
            default:  return l / r;
        }
    }

    Ptr derivative() const override {
        const Ptr dl = lhs_->derivative();
        const Ptr dr = rhs_->derivative();
        switch (op_) {
            case '+': return std::make_shared<Binary>('+', dl, dr);
            case '-': return std::make_shared<Binary>('-', dl, dr);
            case '*':
                return std::make_shared<Binary>(
                    '+', std::make_shared<Binary>('*', dl, rhs_),
                    std::make_shared<Binary>('*', lhs_, dr));
            default: {
                // (l/r)' = (l'r - l r') / r^2
                const Ptr num = std::make_shared<Binary>(
                    '-', std::make_shared<Binary>('*', dl, rhs_),
                    std::make_shared<Binary>('*', lhs_, dr));
                const Ptr den = std::make_shared<Binary>('*', rhs_, rhs_);
                return std::make_shared<Binary>('/', num, den);
            }
        }
    }

    std::string str() const override {
        return "(" + lhs_->str() + op_ + rhs_->str() + ")";
    }

private:
    char op_;
    Ptr lhs_, rhs_;
};

class Power final : public Expression {
public:
    Power(Ptr base, int exponent) : base_(std::move(base)), exponent_(exponent) {}

    double eval(double x) const override {
        return std::pow(base_->eval(x), exponent_);
    }

    Ptr derivative() const override {
        if (exponent_ == 0) return std::make_shared<Constant>(0.0);
        // (b^n)' = n * b^(n-1) * b'
        const Ptr factor = std::make_shared<Binary>(
            '*', std::make_shared<Constant>(static_cast<double>(exponent_)),
            std::make_shared<Power>(base_, exponent_ - 1));
        return std::make_shared<Binary>('*', factor, base_->derivative());
    }

    std::string str() const override {
        return "(" + base_->str() + "^" + std::to_string(exponent_) + ")";
    }

private:
    Ptr base_;
    int exponent_;
};

class Negate final : public Expression {
public:
    explicit Negate(Ptr inner) : inner_(std::move(inner)) {}
    double eval(double x) const override { return -inner_->eval(x); }
    Ptr derivative() const override {
        return std::make_shared<Negate>(inner_->derivative());
    }
    std::string str() const override { return "(-" + inner_->str() + ")"; }

private:
    Ptr inner_;
};

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    Expression::Ptr parse() {
        Expression::Ptr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        return e;
    }

private:
    Expression::Ptr parse_sum() {
        Expression::Ptr lhs = parse_term();
        for (;;) {
            skip_ws();
            if (peek() == '+' || peek() == '-') {
                const char op = take();
                lhs = std::make_shared<Binary>(op, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    Expression::Ptr parse_term() {
        Expression::Ptr lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (peek() == '*' || peek() == '/') {
                const char op = take();
                lhs = std::make_shared<Binary>(op, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    Expression::Ptr parse_unary() {
        skip_ws();
        if (peek() == '-') {
            take();
            return std::make_shared<Negate>(parse_unary());
        }
        if (peek() == '+') {
            take();
            return parse_unary();
        }
        return parse_power();
    }

    Expression::Ptr parse_power() {
        Expression::Ptr base = parse_atom();
        skip_ws();
        if (peek() == '^') {
            take();
            skip_ws();
            bool neg = false;
            if (peek() == '-') { take(); neg = true; }
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                fail("integer exponent expected after '^'");
            int n = 0;
            while (std::isdigit(static_cast<unsigned char>(peek())))
                n = 10 * n + (take() - '0');
            if (neg) n = -n;
            return std::make_shared<Power>(base, n);
        }
        return base;
    }

    Expression::Ptr parse_atom() {
        skip_ws();
        const char c = peek();
        if (c == '(') {
            take();
            Expression::Ptr e = parse_sum();
            skip_ws();
            if (peek() != ')') fail("missing ')'");
            take();
            return e;
        }
        if (c == 'x') {
            take();
            return std::make_shared<Variable>();
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::size_t start = pos_;
            while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')
                take();
            if (peek() == 'e' || peek() == 'E') {
                take();
                if (peek() == '+' || peek() == '-') take();
                while (std::isdigit(static_cast<unsigned char>(peek()))) take();
            }
            const std::string tok(text_.substr(start, pos_ - start));
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) fail("malformed number '" + tok + "'");
            return std::make_shared<Constant>(v);
        }
        fail(std::string("unexpected character '") + c + "'");
        return nullptr;  // unreachable
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char take() { return text_[pos_++]; }
    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("expression parse error at offset " +
                                    std::to_string(pos_) + ": " + msg);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Expression::Ptr parse_expression(std::string_view text) {
    return detail::ExprParser(text).parse();
}

inline Expression::Ptr constant_expression(double value) {
    return std::make_shared<detail::Constant>(value);
}

}  // namespace phsdecay
