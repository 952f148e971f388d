#include "succession/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace succession {

namespace {

bool all_digits(const std::string& text) {
    if (text.empty()) return false;
    for (char c : text) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

[[noreturn]] void bad_rational(const std::string& text) {
    throw std::domain_error("invalid rational literal: '" + text + "'");
}

} // namespace

Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    Rational value(num, den);
    value.canonicalize();
    return value;
}

Rational make_rational(std::int64_t num, std::int64_t den) {
    return make_rational(Integer(static_cast<long>(num)), Integer(static_cast<long>(den)));
}

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    }
    if (s.empty()) bad_rational(text);

    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = (s[0] == '-');
        s.erase(0, 1);
    }
    if (s.empty()) bad_rational(text);

    Rational value;
    if (auto slash = s.find('/'); slash != std::string::npos) {
        const std::string num = s.substr(0, slash);
        const std::string den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) bad_rational(text);
        value = make_rational(Integer(num), Integer(den));
    } else if (auto dot = s.find('.'); dot != std::string::npos) {
        const std::string whole = s.substr(0, dot);
        const std::string frac = s.substr(dot + 1);
        if (whole.empty() && frac.empty()) bad_rational(text);
        if (!whole.empty() && !all_digits(whole)) bad_rational(text);
        if (!frac.empty() && !all_digits(frac)) bad_rational(text);
        Integer scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        Integer num = whole.empty() ? Integer(0) : Integer(whole);
        num *= scale;
        if (!frac.empty()) num += Integer(frac);
        value = make_rational(num, scale);
    } else {
        if (!all_digits(s)) bad_rational(text);
        value = Rational(Integer(s));
    }
    return negative ? Rational(-value) : value;
}

Integer round_div_half_even(const Integer& num, const Integer& den) {
    if (den <= 0) throw std::domain_error("round_div_half_even: denominator must be positive");
    Integer quot, rem;
    mpz_fdiv_qr(quot.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    const Integer twice = 2 * rem;
    if (twice > den || (twice == den && mpz_odd_p(quot.get_mpz_t()))) {
        quot += 1;
    }
    return quot;
}

std::string to_decimal(const Rational& value, int fraction_digits) {
    if (fraction_digits < 0) throw std::domain_error("to_decimal: negative digit count");
    const bool negative = sgn(value) < 0;
    Integer num = abs(value.get_num());
    const Integer den = value.get_den();
    Integer scale = 1;
    for (int i = 0; i < fraction_digits; ++i) scale *= 10;
    const Integer scaled = round_div_half_even(num * scale, den);
    Integer whole = scaled / scale;
    Integer frac = scaled % scale;

    std::string out;
    if (negative && scaled != 0) out.push_back('-');
    out += whole.get_str();
    if (fraction_digits > 0) {
        std::string digits = frac.get_str();
        out.push_back('.');
        out.append(static_cast<std::size_t>(fraction_digits) - digits.size(), '0');
        out += digits;
    }
    return out;
}

std::string to_fraction(const Rational& value) {
    return value.get_str();
}

} // namespace succession
