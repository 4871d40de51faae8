#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace chroma {

using BigInt = boost::multiprecision::cpp_int;

/// Univariate polynomial with arbitrary-precision integer coefficients,
/// index = degree, kept free of trailing zeros.
class IntPolynomial {
public:
    IntPolynomial() = default;
    explicit IntPolynomial(std::vector<BigInt> coefficients);

    static IntPolynomial constant(const BigInt& c);
    static IntPolynomial monomial(const BigInt& c, std::size_t degree);
    /// x - a
    static IntPolynomial linear_root(const BigInt& a);

    const std::vector<BigInt>& coefficients() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }
    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    BigInt coefficient(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : BigInt(0); }

    BigInt evaluate(const BigInt& x) const;
    /// Substitutes x -> x + shift.
    IntPolynomial shifted(const BigInt& shift) const;

    IntPolynomial& operator+=(const IntPolynomial& rhs);
    IntPolynomial& operator-=(const IntPolynomial& rhs);
    IntPolynomial& operator*=(const IntPolynomial& rhs);

    friend IntPolynomial operator+(IntPolynomial a, const IntPolynomial& b) { return a += b; }
    friend IntPolynomial operator-(IntPolynomial a, const IntPolynomial& b) { return a -= b; }
    friend IntPolynomial operator*(IntPolynomial a, const IntPolynomial& b) { return a *= b; }
    friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

    IntPolynomial pow(std::size_t e) const;

    /// e.g. "x^3 - 3x^2 + 2x"
    std::string to_string(const std::string& var = "x") const;

private:
    void trim();
    std::vector<BigInt> coeffs_;
};

}  // namespace chroma
