#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsurg {

// Exact nonnegative rational. den == 0 encodes +infinity (used as the "no
// constraint" sentinel by the expansion routines).
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) {
        normalize();
    }
    explicit Rational(long long n) : num(n), den(1) {}

    void normalize() {
        if (den == 0) {
            num = 1;
            return;
        }
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    bool infinite() const {
        return den == 0;
    }

    double value() const {
        if (infinite()) {
            throw std::domain_error("rational: value of infinity");
        }
        return double(num) / double(den);
    }

    std::string str() const {
        if (infinite()) {
            return "inf";
        }
        if (den == 1) {
            return std::to_string(num);
        }
        return std::to_string(num) + "/" + std::to_string(den);
    }

    static Rational infinity() {
        return Rational(1, 0);
    }
};

inline bool operator==(const Rational& a, const Rational& b) {
    if (a.infinite() || b.infinite()) {
        return a.infinite() && b.infinite();
    }
    return a.num == b.num && a.den == b.den;
}

inline bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
}

inline bool operator<(const Rational& a, const Rational& b) {
    if (a.infinite()) {
        return false;
    }
    if (b.infinite()) {
        return true;
    }
    return a.num * b.den < b.num * a.den;
}

inline bool operator<=(const Rational& a, const Rational& b) {
    return !(b < a);
}

inline bool operator>(const Rational& a, const Rational& b) {
    return b < a;
}

inline bool operator>=(const Rational& a, const Rational& b) {
    return !(a < b);
}

inline Rational operator*(const Rational& a, const Rational& b) {
    if (a.infinite() || b.infinite()) {
        return Rational::infinity();
    }
    return Rational(a.num * b.num, a.den * b.den);
}

inline Rational operator+(const Rational& a, const Rational& b) {
    if (a.infinite() || b.infinite()) {
        return Rational::infinity();
    }
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
}

inline Rational min(const Rational& a, const Rational& b) {
    return b < a ? b : a;
}

}  // namespace qsurg
