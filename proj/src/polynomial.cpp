#include "chroma/polynomial.hpp"

#include <algorithm>

namespace chroma {

IntPolynomial::IntPolynomial(std::vector<BigInt> coefficients)
    : coeffs_(std::move(coefficients))
{
    trim();
}

IntPolynomial IntPolynomial::constant(const BigInt& c)
{
    return IntPolynomial({c});
}

IntPolynomial IntPolynomial::monomial(const BigInt& c, std::size_t degree)
{
    std::vector<BigInt> coeffs(degree + 1);
    coeffs[degree] = c;
    return IntPolynomial(std::move(coeffs));
}

IntPolynomial IntPolynomial::linear_root(const BigInt& a)
{
    return IntPolynomial({-a, BigInt(1)});
}

void IntPolynomial::trim()
{
    while (!coeffs_.empty() && coeffs_.back() == 0)
        coeffs_.pop_back();
}

BigInt IntPolynomial::evaluate(const BigInt& x) const
{
    BigInt acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = acc * x + *it;
    return acc;
}

IntPolynomial IntPolynomial::shifted(const BigInt& shift) const
{
    IntPolynomial out;
    const IntPolynomial base({shift, BigInt(1)});
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        out *= base;
        out += constant(*it);
    }
    return out;
}

IntPolynomial& IntPolynomial::operator+=(const IntPolynomial& rhs)
{
    if (coeffs_.size() < rhs.coeffs_.size())
        coeffs_.resize(rhs.coeffs_.size());
    for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i)
        coeffs_[i] += rhs.coeffs_[i];
    trim();
    return *this;
}

IntPolynomial& IntPolynomial::operator-=(const IntPolynomial& rhs)
{
    if (coeffs_.size() < rhs.coeffs_.size())
        coeffs_.resize(rhs.coeffs_.size());
    for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i)
        coeffs_[i] -= rhs.coeffs_[i];
    trim();
    return *this;
}

IntPolynomial& IntPolynomial::operator*=(const IntPolynomial& rhs)
{
    if (is_zero() || rhs.is_zero()) {
        coeffs_.clear();
        return *this;
    }
    std::vector<BigInt> out(coeffs_.size() + rhs.coeffs_.size() - 1);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0)
            continue;
        for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j)
            out[i + j] += coeffs_[i] * rhs.coeffs_[j];
    }
    coeffs_ = std::move(out);
    trim();
    return *this;
}

IntPolynomial IntPolynomial::pow(std::size_t e) const
{
    IntPolynomial result = constant(1);
    IntPolynomial base = *this;
    while (e > 0) {
        if (e & 1)
            result *= base;
        base *= base;
        e >>= 1;
    }
    return result;
}

std::string IntPolynomial::to_string(const std::string& var) const
{
    if (coeffs_.empty())
        return "0";
    std::string out;
    for (int d = degree(); d >= 0; --d) {
        const BigInt& c = coeffs_[static_cast<std::size_t>(d)];
        if (c == 0)
            continue;
        const BigInt mag = c < 0 ? BigInt(-c) : c;
        if (out.empty())
            out += c < 0 ? "-" : "";
        else
            out += c < 0 ? " - " : " + ";
        if (mag != 1 || d == 0)
            out += mag.str();
        if (d >= 1)
            out += var;
        if (d >= 2)
            out += "^" + std::to_string(d);
    }
    return out;
}

}  // namespace chroma
