#pragma once
// numbers a + b/sqrt(3) with rational a, b; closed under + - * /
#include <boost/rational.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hexwave {

using Q = boost::rational<std::int64_t>;

inline double to_double(const Q& q) { return double(q.numerator()) / double(q.denominator()); }

inline int sgn(const Q& q) { return q.numerator() > 0 ? 1 : (q.numerator() < 0 ? -1 : 0); }

struct QS3 {
  Q a{0}, b{0};  // a + b/sqrt(3)

  QS3() = default;
  QS3(Q a_) : a(a_) {}
  QS3(std::int64_t a_) : a(a_) {}
  QS3(Q a_, Q b_) : a(a_), b(b_) {}

  double value() const { return to_double(a) + to_double(b) / std::sqrt(3.0); }
  bool is_rational() const { return b.numerator() == 0; }
  bool is_integer() const { return b.numerator() == 0 && a.denominator() == 1; }

  QS3 operator-() const { return {-a, -b}; }
  QS3& operator+=(const QS3& o) { a += o.a; b += o.b; return *this; }
  QS3& operator-=(const QS3& o) { a -= o.a; b -= o.b; return *this; }
  friend QS3 operator+(QS3 x, const QS3& y) { return x += y; }
  friend QS3 operator-(QS3 x, const QS3& y) { return x -= y; }
  // (a + b/r)(c + d/r) = ac + bd/3 + (ad + bc)/r
  friend QS3 operator*(const QS3& x, const QS3& y) {
    return {x.a * y.a + x.b * y.b / Q(3), x.a * y.b + x.b * y.a};
  }
  QS3 conj() const { return {a, -b}; }
  Q norm() const { return a * a - b * b / Q(3); }  // x * conj(x), rational
  friend QS3 operator/(const QS3& x, const QS3& y) {
    Q n = y.norm();
    if (n.numerator() == 0) throw std::domain_error("QS3 division by zero");
    QS3 t = x * y.conj();
    return {t.a / n, t.b / n};
  }
  friend bool operator==(const QS3& x, const QS3& y) { return x.a == y.a && x.b == y.b; }
  friend bool operator!=(const QS3& x, const QS3& y) { return !(x == y); }

  // exact sign: compare a against -b/sqrt3
  int sign() const {
    int sa = hexwave::sgn(a), sb = hexwave::sgn(b);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    Q d = a * a - b * b / Q(3);  // |a| vs |b|/sqrt3
    if (d.numerator() == 0) return 0;
    return d.numerator() > 0 ? sa : sb;
  }
  std::string str() const;
};

}  // namespace hexwave
