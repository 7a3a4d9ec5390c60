#pragma once

// Exact arithmetic over the Gaussian rationals Q[i] and projective
// single-qubit covectors ("bras") with entries in Q[i].

#include <gmpxx.h>

#include <iosfwd>
#include <string>
#include <string_view>

namespace qsat2 {

class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long re) : re_(re) {}  // NOLINT: implicit from integers is intended
    GaussianRational(mpq_class re, mpq_class im = 0);

    static GaussianRational i() { return GaussianRational(0, 1); }

    const mpq_class& re() const noexcept { return re_; }
    const mpq_class& im() const noexcept { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }

    GaussianRational conj() const { return {re_, -im_}; }
    // |z|^2, always rational.
    mpq_class norm() const { return re_ * re_ + im_ * im_; }

    GaussianRational operator-() const { return {-re_, -im_}; }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b);
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b);
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b);
    // Throws ArithmeticError when b == 0.
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b);

    GaussianRational& operator+=(const GaussianRational& b) { return *this = *this + b; }
    GaussianRational& operator-=(const GaussianRational& b) { return *this = *this - b; }
    GaussianRational& operator*=(const GaussianRational& b) { return *this = *this * b; }
    GaussianRational& operator/=(const GaussianRational& b) { return *this = *this / b; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    // Text form `a/b+c/di`; denominators equal to 1 are omitted, e.g. `1/2-3/4i`, `1+0i`.
    std::string to_string() const;
    // Accepts the form written by to_string (and the same with explicit /1 denominators).
    static GaussianRational parse(std::string_view text);

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

enum class ArithOp { add, sub, mul, div };

GaussianRational gq_arith(const GaussianRational& a, const GaussianRational& b, ArithOp op);

std::ostream& operator<<(std::ostream& os, const GaussianRational& z);

// Two-component vector with a projective canonical form: the first nonzero
// component is 1. Shared by bras (row covectors) and kets (column vectors).
template <typename Tag>
class ProjectiveQubit {
public:
    // Throws UsageError when both components are zero.
    ProjectiveQubit(GaussianRational c0, GaussianRational c1);

    const GaussianRational& c0() const noexcept { return c0_; }
    const GaussianRational& c1() const noexcept { return c1_; }
    const GaussianRational& operator[](int k) const noexcept { return k == 0 ? c0_ : c1_; }

    friend bool operator==(const ProjectiveQubit& a, const ProjectiveQubit& b) {
        return a.c0_ == b.c0_ && a.c1_ == b.c1_;
    }
    friend bool operator!=(const ProjectiveQubit& a, const ProjectiveQubit& b) { return !(a == b); }

    // `(<gq>,<gq>)`
    std::string to_string() const;
    static ProjectiveQubit parse(std::string_view text);

private:
    GaussianRational c0_;
    GaussianRational c1_;
};

struct BraTag {};
struct KetTag {};

// Single-qubit covector <alpha| up to a nonzero scalar.
using BraState = ProjectiveQubit<BraTag>;
// Single-qubit state |psi> up to a nonzero scalar.
using KetState = ProjectiveQubit<KetTag>;

extern template class ProjectiveQubit<BraTag>;
extern template class ProjectiveQubit<KetTag>;

// <b|k> as the bilinear pairing b0*k0 + b1*k1.
GaussianRational apply(const BraState& b, const KetState& k);

// The unique (projective) state annihilated by b.
KetState kernel_ket(const BraState& b);

// True iff a and b are nonzero multiples of each other.
bool proportional(const BraState& a, const BraState& b);

}  // namespace qsat2
