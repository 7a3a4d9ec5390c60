#include "qsat2/exactq.hpp"

#include <cctype>
#include <ostream>

#include "qsat2/errors.hpp"

namespace qsat2 {

GaussianRational::GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
}

GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re_ + b.re_, a.im_ + b.im_};
}

GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re_ - b.re_, a.im_ - b.im_};
}

GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
}

GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    if (b.is_zero()) throw ArithmeticError("division by zero in Q[i]");
    const mpq_class n = b.norm();
    const GaussianRational num = a * b.conj();
    return {num.re_ / n, num.im_ / n};
}

GaussianRational gq_arith(const GaussianRational& a, const GaussianRational& b, ArithOp op) {
    switch (op) {
        case ArithOp::add: return a + b;
        case ArithOp::sub: return a - b;
        case ArithOp::mul: return a * b;
        case ArithOp::div: return a / b;
    }
    throw UsageError("unknown arithmetic op");
}

namespace {

std::string rational_text(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    bool done() const { return pos_ >= s_.size(); }
    char peek() const { return done() ? '\0' : s_[pos_]; }
    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    // [+-]?digits
    std::string integer(bool allow_sign) {
        std::string out;
        if (allow_sign && (peek() == '+' || peek() == '-')) {
            if (peek() == '-') out.push_back('-');
            ++pos_;
        }
        const std::size_t start = pos_;
        while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (pos_ == start) fail("expected digits");
        out.append(s_.substr(start, pos_ - start));
        return out;
    }

    // integer ['/' digits]
    mpq_class rational(bool allow_sign) {
        const std::string num = integer(allow_sign);
        std::string den = "1";
        if (accept('/')) den = integer(false);
        mpz_class d(den);
        if (d == 0) fail("zero denominator");
        mpq_class q(mpz_class(num), d);
        q.canonicalize();
        return q;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("bad exact value '" + std::string(s_) + "' at offset " + std::to_string(pos_) + ": " +
                         what);
    }

    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

GaussianRational parse_gq(Cursor& c) {
    mpq_class re = c.rational(true);
    const char sign = c.peek();
    if (sign != '+' && sign != '-') c.fail("expected sign of imaginary part");
    mpq_class im = c.rational(true);
    c.expect('i');
    return {re, im};
}

}  // namespace

std::string GaussianRational::to_string() const {
    std::string out = rational_text(re_);
    out += sgn(im_) < 0 ? "-" : "+";
    out += rational_text(abs(im_));
    out += "i";
    return out;
}

GaussianRational GaussianRational::parse(std::string_view text) {
    Cursor c(text);
    GaussianRational z = parse_gq(c);
    if (!c.done()) c.fail("trailing characters");
    return z;
}

std::ostream& operator<<(std::ostream& os, const GaussianRational& z) { return os << z.to_string(); }

template <typename Tag>
ProjectiveQubit<Tag>::ProjectiveQubit(GaussianRational c0, GaussianRational c1) {
    if (c0.is_zero() && c1.is_zero()) throw UsageError("single-qubit vector with both components zero");
    if (!c0.is_zero()) {
        c1_ = c1 / c0;
        c0_ = GaussianRational(1);
    } else {
        c0_ = GaussianRational(0);
        c1_ = GaussianRational(1);
    }
}

template <typename Tag>
std::string ProjectiveQubit<Tag>::to_string() const {
    return "(" + c0_.to_string() + "," + c1_.to_string() + ")";
}

template <typename Tag>
ProjectiveQubit<Tag> ProjectiveQubit<Tag>::parse(std::string_view text) {
    Cursor c(text);
    c.expect('(');
    GaussianRational a = parse_gq(c);
    c.expect(',');
    GaussianRational b = parse_gq(c);
    c.expect(')');
    if (!c.done()) c.fail("trailing characters");
    if (a.is_zero() && b.is_zero()) throw ParseError("zero vector '" + std::string(text) + "'");
    return ProjectiveQubit(std::move(a), std::move(b));
}

template class ProjectiveQubit<BraTag>;
template class ProjectiveQubit<KetTag>;

GaussianRational apply(const BraState& b, const KetState& k) { return b.c0() * k.c0() + b.c1() * k.c1(); }

KetState kernel_ket(const BraState& b) { return KetState(-b.c1(), b.c0()); }

bool proportional(const BraState& a, const BraState& b) { return a == b; }

}  // namespace qsat2
