#include "lprx/rational.hpp"

#include "lprx/error.hpp"

#include <cmath>

namespace lprx {

Rational rational_from_double(double value)
{
    if (!std::isfinite(value)) {
        throw ValidationError("cannot rationalize a non-finite value");
    }
    Rational q;
    mpq_set_d(q.get_mpq_t(), value);
    return q;
}

std::string to_string(const Rational& value)
{
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

namespace {

Integer parse_integer(std::string_view text, std::string_view whole)
{
    std::string digits(text);
    if (digits.empty() || digits == "-" || digits == "+") {
        throw ParseError("malformed rational '" + std::string(whole) + "'");
    }
    if (digits.front() == '+') {
        digits.erase(digits.begin());
    }
    Integer z;
    if (z.set_str(digits, 10) != 0) {
        throw ParseError("malformed rational '" + std::string(whole) + "'");
    }
    return z;
}

// Decimal with optional fraction and exponent, parsed exactly.
Rational parse_decimal(std::string_view text)
{
    std::string_view mantissa = text;
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = text.substr(0, e);
        exponent = parse_integer(text.substr(e + 1), text).get_si();
    }
    std::string digits;
    bool negative = false;
    std::size_t pos = 0;
    if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
        negative = mantissa[0] == '-';
        pos = 1;
    }
    bool seen_point = false;
    bool seen_digit = false;
    for (; pos < mantissa.size(); ++pos) {
        const char c = mantissa[pos];
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) {
                --exponent;
            }
        } else {
            throw ParseError("malformed rational '" + std::string(text) + "'");
        }
    }
    if (!seen_digit) {
        throw ParseError("malformed rational '" + std::string(text) + "'");
    }
    Integer num(digits, 10);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational q = exponent < 0 ? Rational(num, scale) : Rational(num * scale);
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Integer num = parse_integer(text.substr(0, slash), text);
        Integer den = parse_integer(text.substr(slash + 1), text);
        if (den == 0) {
            throw ParseError("zero denominator in '" + std::string(text) + "'");
        }
        Rational q(num, den);
        q.canonicalize();
        return q;
    }
    return parse_decimal(text);
}

} // namespace lprx
