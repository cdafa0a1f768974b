#include <algorithm>
#include <cmath>
#include <numeric>

#include "hexwave/partition.hpp"

namespace hexwave {

namespace {

struct Keyed {
  LineKey key;
  Q t0, t1;
};

Keyed key_of(const Seg& s) {
  Q e0 = s.q[0] - s.p[0], e1 = s.q[1] - s.p[1];
  i64 l = std::lcm(e1.denominator(), e0.denominator());
  i64 n1 = (e1 * l).numerator(), n2 = (-e0 * l).numerator();
  i64 g = std::gcd(n1, n2);
  if (g == 0) throw std::invalid_argument("degenerate segment");
  n1 /= g, n2 /= g;
  if (n1 < 0 || (n1 == 0 && n2 < 0)) n1 = -n1, n2 = -n2;
  Q b = Q(n1) * s.p[0] + Q(n2) * s.p[1];
  Q t0 = Q(-n2) * s.p[0] + Q(n1) * s.p[1];
  Q t1 = Q(-n2) * s.q[0] + Q(n1) * s.q[1];
  if (t1 < t0) std::swap(t0, t1);
  return {{n1, n2, b}, t0, t1};
}

RPt point_on(const LineKey& k, const Q& t) {
  Q n2 = Q(k.a1 * k.a1 + k.a2 * k.a2);
  return {(Q(k.a1) * k.b - Q(k.a2) * t) / n2, (Q(k.a2) * k.b + Q(k.a1) * t) / n2};
}

}  // namespace

void SegSet::normalize(std::vector<std::pair<Q, Q>>& iv) const {
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<Q, Q>> out;
  for (auto& x : iv) {
    if (!(x.first < x.second)) continue;
    if (!out.empty() && !(out.back().second < x.first))
      out.back().second = std::max(out.back().second, x.second);
    else
      out.push_back(x);
  }
  iv.swap(out);
}

void SegSet::add(const LineKey& l, Q t0, Q t1) {
  if (!(t0 < t1)) return;
  auto& iv = lines_[l];
  iv.push_back({t0, t1});
  normalize(iv);
}

void SegSet::add(const Seg& s) {
  auto k = key_of(s);
  add(k.key, k.t0, k.t1);
}

SegSet SegSet::unite(const SegSet& o) const {
  SegSet r = *this;
  for (auto& [k, iv] : o.lines_) {
    auto& dst = r.lines_[k];
    dst.insert(dst.end(), iv.begin(), iv.end());
    normalize(dst);
  }
  return r;
}

SegSet SegSet::intersect(const SegSet& o) const {
  SegSet r;
  for (auto& [k, iv] : lines_) {
    auto it = o.lines_.find(k);
    if (it == o.lines_.end()) continue;
    std::vector<std::pair<Q, Q>> acc;
    for (auto& a : iv)
      for (auto& b : it->second) {
        Q lo = std::max(a.first, b.first), hi = std::min(a.second, b.second);
        if (lo < hi) acc.push_back({lo, hi});
      }
    normalize(acc);
    if (!acc.empty()) r.lines_[k] = acc;
  }
  return r;
}

SegSet SegSet::subtract(const SegSet& o) const {
  SegSet r;
  for (auto& [k, iv] : lines_) {
    auto it = o.lines_.find(k);
    if (it == o.lines_.end()) {
      r.lines_[k] = iv;
      continue;
    }
    std::vector<std::pair<Q, Q>> cur = iv;
    for (auto& b : it->second) {
      std::vector<std::pair<Q, Q>> nxt;
      for (auto& a : cur) {
        if (!(b.first < a.second) || !(a.first < b.second)) {
          nxt.push_back(a);
          continue;
        }
        if (a.first < b.first) nxt.push_back({a.first, b.first});
        if (b.second < a.second) nxt.push_back({b.second, a.second});
      }
      cur.swap(nxt);
    }
    normalize(cur);
    if (!cur.empty()) r.lines_[k] = cur;
  }
  return r;
}

SegSet SegSet::translate(const RPt& v) const {
  SegSet r;
  for (auto& [k, iv] : lines_) {
    Q db = Q(k.a1) * v[0] + Q(k.a2) * v[1];
    Q dt = Q(-k.a2) * v[0] + Q(k.a1) * v[1];
    LineKey nk{k.a1, k.a2, k.b + db};
    auto& dst = r.lines_[nk];
    for (auto& x : iv) dst.push_back({x.first + dt, x.second + dt});
  }
  return r;
}

std::vector<Seg> SegSet::segments() const {
  std::vector<Seg> out;
  for (auto& [k, iv] : lines_)
    for (auto& x : iv) out.push_back({point_on(k, x.first), point_on(k, x.second)});
  return out;
}

double SegSet::length(const ReciprocalCell& cell) const {
  double L = 0;
  for (auto& s : segments()) {
    auto a = cell.to_xi({to_double(s.p[0]), to_double(s.p[1])});
    auto b = cell.to_xi({to_double(s.q[0]), to_double(s.q[1])});
    L += std::hypot(a[0] - b[0], a[1] - b[1]);
  }
  return L;
}

}  // namespace hexwave
