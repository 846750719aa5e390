#include "exactpack/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace exactpack {

Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw std::invalid_argument("make_rational: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Rational rational_from_decimal(std::string_view text) {
    // trim
    size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    text = text.substr(b, e - b);
    if (text.empty()) throw std::invalid_argument("rational_from_decimal: empty token");

    // n/d form
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Integer num(std::string(text.substr(0, slash)), 10);
        Integer den(std::string(text.substr(slash + 1)), 10);
        return make_rational(num, den);
    }

    std::string digits;
    digits.reserve(text.size());
    bool neg = false;
    size_t i = 0;
    if (text[i] == '+' || text[i] == '-') {
        neg = text[i] == '-';
        ++i;
    }
    long frac_digits = 0;
    long exponent = 0;
    bool seen_point = false, seen_digit = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_point) throw std::invalid_argument("rational_from_decimal: two points");
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == 'e' || c == 'E') {
            exponent = std::strtol(std::string(text.substr(i + 1)).c_str(), nullptr, 10);
            break;
        } else {
            throw std::invalid_argument("rational_from_decimal: bad character in '" +
                                        std::string(text) + "'");
        }
    }
    if (!seen_digit) throw std::invalid_argument("rational_from_decimal: no digits");
    Integer num(digits.empty() ? "0" : digits, 10);
    if (neg) num = -num;
    long net = exponent - frac_digits;
    Integer scale = int_pow(Integer(10), static_cast<unsigned long>(net < 0 ? -net : net));
    return net >= 0 ? Rational(num * scale) : make_rational(num, scale);
}

std::string decimal_string(const Rational& q, int digits) {
    if (digits < 0) digits = 0;
    bool neg = q < 0;
    Rational a = rational_abs(q);
    Integer scale = int_pow(Integer(10), static_cast<unsigned long>(digits));
    // round half away from zero
    Integer scaled_num = a.get_num() * scale * 2 + a.get_den();
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), scaled_num.get_mpz_t(), Integer(a.get_den() * 2).get_mpz_t());
    std::string s = r.get_str();
    if (static_cast<int>(s.size()) <= digits) s.insert(0, digits + 1 - s.size(), '0');
    std::string out;
    if (neg && r != 0) out.push_back('-');
    out += s.substr(0, s.size() - digits);
    if (digits > 0) {
        out.push_back('.');
        out += s.substr(s.size() - digits);
    }
    return out;
}

std::string rational_to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational rational_from_string(std::string_view text) { return rational_from_decimal(text); }

Integer int_pow(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

Rational rational_pow(const Rational& base, unsigned long e) {
    return make_rational(int_pow(base.get_num(), e), int_pow(base.get_den(), e));
}

Integer isqrt_floor(const Integer& n) {
    if (n < 0) throw std::invalid_argument("isqrt_floor: negative argument");
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool is_perfect_square(const Integer& n, Integer* root) {
    if (n < 0) return false;
    Integer r = isqrt_floor(n);
    if (r * r != n) return false;
    if (root) *root = r;
    return true;
}

std::optional<Rational> rational_sqrt_exact(const Rational& q) {
    if (q < 0) return std::nullopt;
    Integer rn, rd;
    if (!is_perfect_square(q.get_num(), &rn)) return std::nullopt;
    if (!is_perfect_square(q.get_den(), &rd)) return std::nullopt;
    return make_rational(rn, rd);
}

Rational pow10_inv(unsigned k) { return make_rational(1, int_pow(Integer(10), k)); }

}  // namespace exactpack
