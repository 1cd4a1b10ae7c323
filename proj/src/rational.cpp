#include "rerl/rational.hpp"

#include <cctype>
#include <sstream>

namespace rerl {

Int floor_rat(const Rat& r) {
    Int num = numerator(r);
    Int den = denominator(r);
    Int q = num / den;
    if (num < 0 && q * den != num) --q;
    return q;
}

Rat frac_rat(const Rat& r) { return r - Rat(floor_rat(r)); }

bool is_integer(const Rat& r) { return denominator(r) == 1; }

std::optional<Rat> parse_rat(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        auto p = parse_rat(s.substr(0, slash));
        auto q = parse_rat(s.substr(slash + 1));
        if (!p || !q || *q == 0) return std::nullopt;
        return *p / *q;
    }
    std::string t = s;
    bool neg = false;
    std::size_t i = 0;
    if (t[i] == '+' || t[i] == '-') {
        neg = t[i] == '-';
        ++i;
    }
    std::string int_part, frac_part;
    bool seen_dot = false, seen_digit = false;
    for (; i < t.size(); ++i) {
        if (t[i] == '.') {
            if (seen_dot) return std::nullopt;
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(t[i]))) {
            (seen_dot ? frac_part : int_part) += t[i];
            seen_digit = true;
        } else {
            return std::nullopt;
        }
    }
    if (!seen_digit) return std::nullopt;
    Int num = 0;
    for (char c : int_part) num = num * 10 + (c - '0');
    Int den = 1;
    for (char c : frac_part) {
        num = num * 10 + (c - '0');
        den *= 10;
    }
    Rat r(num, den);
    return neg ? -r : r;
}

std::string rat_to_string(const Rat& r) {
    Int num = numerator(r);
    Int den = denominator(r);
    if (den == 1) return num.str();
    // A denominator of the form 2^a * 5^b admits an exact finite decimal.
    Int d = den;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d == 1) {
        int digits = twos > fives ? twos : fives;
        Int scale = 1;
        for (int i = 0; i < digits; ++i) scale *= 10;
        Int scaled = num * scale / den;
        bool neg = scaled < 0;
        if (neg) scaled = -scaled;
        std::string digits_str = scaled.str();
        if (static_cast<int>(digits_str.size()) <= digits)
            digits_str.insert(0, digits + 1 - digits_str.size(), '0');
        digits_str.insert(digits_str.size() - digits, ".");
        return (neg ? "-" : "") + digits_str;
    }
    return num.str() + "/" + den.str();
}

}  // namespace rerl
