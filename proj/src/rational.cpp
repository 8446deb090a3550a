#include "xferop/rational.hpp"

#include "xferop/errors.hpp"

#include <cctype>

namespace xferop {

Rational::Rational(long n, long d) {
    if (d == 0) throw Error("DivisionByZero", "rational with zero denominator");
    v_ = mpq_class(n, d);
    v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw Error("DivisionByZero", "division of a rational by zero");
    v_ /= o.v_;
    return *this;
}

namespace {

bool valid_integer(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

std::string strip_plus(std::string_view s) {
    return std::string(!s.empty() && s[0] == '+' ? s.substr(1) : s);
}

}  // namespace

Rational Rational::parse(std::string_view text) {
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!valid_integer(num) || !valid_integer(den) || den[0] == '-' || den[0] == '+')
        throw parse_error("malformed rational \"" + std::string(text) + "\"");
    mpz_class n(strip_plus(num));
    mpz_class d{std::string(den)};
    if (d == 0) throw parse_error("zero denominator in \"" + std::string(text) + "\"");
    mpq_class q(n, d);
    q.canonicalize();
    return Rational(q);
}

std::string Rational::str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::size_t Rational::hash() const {
    std::size_t h1 = std::hash<std::string>{}(v_.get_num().get_str(16));
    std::size_t h2 = std::hash<std::string>{}(v_.get_den().get_str(16));
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational pow(const Rational& r, unsigned e) {
    Rational out(1);
    for (unsigned i = 0; i < e; ++i) out *= r;
    return out;
}

Rational midpoint(const Rational& a, const Rational& b) { return (a + b) / Rational(2); }

Rational floor(const Rational& r) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), r.raw().get_num_mpz_t(), r.raw().get_den_mpz_t());
    return Rational(mpq_class(q));
}

}  // namespace xferop
