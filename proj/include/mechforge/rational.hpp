#ifndef MECHFORGE_RATIONAL_HPP_
#define MECHFORGE_RATIONAL_HPP_

#include <gmpxx.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mechforge {

// Exact rational number. Every quantity in the core is one of these; doubles
// only appear in the replicator falsifier and in human-readable output.
class Rational {
 public:
  Rational() = default;
  Rational(long n) : v_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(int n) : v_(n) {}   // NOLINT(google-explicit-constructor)
  Rational(long n, long d) : v_(n, d) {
    if (d == 0) throw std::domain_error("zero denominator");
    v_.canonicalize();
  }
  explicit Rational(const mpq_class& v) : v_(v) { v_.canonicalize(); }

  // Accepts "p", "-p", "p/q" with decimal integers.
  static Rational parse(std::string_view text) {
    auto bad = [&] {
      return std::invalid_argument("not a rational: \"" + std::string(text) +
                                   "\"");
    };
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    std::size_t j = text.size();
    while (j > i && std::isspace(static_cast<unsigned char>(text[j - 1]))) --j;
    std::string_view s = text.substr(i, j - i);
    if (s.empty()) throw bad();
    auto slash = s.find('/');
    auto integer_ok = [](std::string_view part, bool allow_sign) {
      std::size_t k = 0;
      if (allow_sign && !part.empty() && (part[0] == '-' || part[0] == '+'))
        k = 1;
      if (k == part.size()) return false;
      for (; k < part.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(part[k]))) return false;
      return true;
    };
    std::string_view num = s.substr(0, slash);
    std::string_view den =
        slash == std::string_view::npos ? std::string_view("1")
                                        : s.substr(slash + 1);
    if (!integer_ok(num, true) || !integer_ok(den, false)) throw bad();
    std::string num_s(num);
    if (num_s[0] == '+') num_s.erase(0, 1);
    mpz_class n(num_s, 10), d(std::string(den), 10);
    if (d == 0) throw std::invalid_argument("zero denominator in \"" +
                                            std::string(text) + "\"");
    mpq_class q(n, d);
    q.canonicalize();
    return Rational(q);
  }

  // A double is accepted only when its shortest round-trip decimal spelling
  // equals its exact binary value, so 0.5 passes and 0.1 does not.
  static std::optional<Rational> from_double_exact(double x) {
    if (!std::isfinite(x)) return std::nullopt;
    mpq_class exact(x);
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    std::string shortest(buf, res.ptr);
    auto e = shortest.find_first_of("eE");
    std::string mantissa = shortest.substr(0, e);
    long exponent = e == std::string::npos ? 0 : std::stol(shortest.substr(e + 1));
    bool negative = !mantissa.empty() && mantissa[0] == '-';
    if (negative) mantissa.erase(0, 1);
    auto dot = mantissa.find('.');
    std::string digits = mantissa;
    long frac = 0;
    if (dot != std::string::npos) {
      digits = mantissa.substr(0, dot) + mantissa.substr(dot + 1);
      frac = static_cast<long>(mantissa.size() - dot - 1);
    }
    long scale = frac - exponent;
    mpz_class n(digits, 10);
    mpq_class decimal;
    if (scale >= 0) {
      mpz_class p;
      mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(scale));
      decimal = mpq_class(n, p);
    } else {
      mpz_class p;
      mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(-scale));
      decimal = mpq_class(n * p);
    }
    decimal.canonicalize();
    if (negative) decimal = -decimal;
    if (decimal != exact) return std::nullopt;
    return Rational(exact);
  }

  const mpq_class& value() const { return v_; }
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }

  std::string str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }
  double to_double() const { return v_.get_d(); }
  int sign() const { return sgn(v_); }
  bool is_zero() const { return sgn(v_) == 0; }

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    v_ /= o.v_;
    return *this;
  }
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.v_ == b.v_;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : c > 0 ? std::strong_ordering::greater
                         : std::strong_ordering::equal;
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
  }

 private:
  mpq_class v_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
inline const Rational& max(const Rational& a, const Rational& b) {
  return a < b ? b : a;
}
inline const Rational& min(const Rational& a, const Rational& b) {
  return b < a ? b : a;
}

// 2^-k as an exact rational.
inline Rational dyadic(unsigned k) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, k);
  return Rational(mpq_class(mpz_class(1), p));
}

// Largest integer not exceeding r.
inline mpz_class floor_int(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.value().get_num_mpz_t(),
             r.value().get_den_mpz_t());
  return q;
}

}  // namespace mechforge

#endif  // MECHFORGE_RATIONAL_HPP_
