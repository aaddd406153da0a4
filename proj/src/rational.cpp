#include "ergoscope/rational.hpp"

#include "ergoscope/error.hpp"

#include <limits>

namespace ergoscope {

Rational make_rational(long num, long den) {
    if (den == 0) fail(ErrorKind::InvalidParams, "zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) fail(ErrorKind::InvalidParams, "zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_string(const Integer& z) { return z.get_str(); }

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (ch != ' ' && ch != '\t') s.push_back(ch);
    if (s.empty()) fail(ErrorKind::InvalidParams, "empty rational literal");
    try {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            Integer num(s.substr(0, slash), 10);
            Integer den(s.substr(slash + 1), 10);
            return make_rational(num, den);
        }
        auto dot = s.find('.');
        if (dot != std::string::npos) {
            // Decimal literal, read exactly.
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            std::size_t scale = s.size() - dot - 1;
            if (digits == "-" || digits == "+" || digits.empty()) digits += "0";
            if (digits[0] == '+') digits.erase(0, 1);
            Integer num(digits, 10);
            Integer den = 1;
            for (std::size_t i = 0; i < scale; ++i) den *= 10;
            return make_rational(num, den);
        }
        if (s[0] == '+') s.erase(0, 1);
        return Rational(Integer(s, 10));
    } catch (const std::invalid_argument&) {
        fail(ErrorKind::InvalidParams, "malformed rational literal '" + text + "'");
    }
}

Integer floor_of(const Rational& q) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

Rational frac_of(const Rational& q) { return q - Rational(floor_of(q)); }

double to_double(const Rational& q) { return mpq_get_d(q.get_mpq_t()); }

std::int64_t to_int64(const Integer& z) {
    if (!mpz_fits_slong_p(z.get_mpz_t()))
        fail(ErrorKind::OutOfRange, "integer does not fit in 64 bits: " + z.get_str());
    return static_cast<std::int64_t>(z.get_si());
}

}  // namespace ergoscope
