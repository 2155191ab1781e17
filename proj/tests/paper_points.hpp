#pragma once

#include "jomatch/instance.hpp"

#include <array>

namespace jomatch::testing {

using R = Rational;

inline Block<R> m2(R a, R b, R c, R d) {
  Block<R> m(2, 2);
  m << a, b, c, d;
  return m;
}

inline RationalMaps c32_point(const Block<R>& x12, const Block<R>& x13, const Block<R>& x23) {
  RationalMaps s(ObjectConfig::uniform(3, 2));
  s.block(0, 1) = x12;
  s.block(0, 2) = x13;
  s.block(1, 2) = x23;
  return s;
}

inline R frac(int a, int b) { return R(a, b); }

// Fractional points on C_{3,2} used as worked examples.
inline RationalMaps triangle_point() {
  auto x = m2(frac(3, 4), frac(1, 4), frac(1, 4), frac(3, 4));
  return c32_point(x, x, m2(frac(1, 4), frac(3, 4), frac(3, 4), frac(1, 4)));
}
inline RationalMaps two_subset_point() {
  return c32_point(m2(frac(1, 2), frac(1, 2), 0, 0), m2(0, frac(1, 2), 0, 0), m2(0, 0, 0, 0));
}
inline RationalMaps third_point() {
  return c32_point(m2(0, 0, 0, 0), m2(0, frac(1, 3), 0, frac(1, 3)), m2(0, frac(1, 3), 0, frac(1, 3)));
}
inline RationalMaps block_point() {
  return c32_point(m2(0, frac(1, 2), 0, 0), m2(frac(1, 2), frac(1, 2), 0, 0),
                   m2(frac(1, 2), frac(1, 2), frac(1, 2), frac(1, 2)));
}
inline RationalMaps outside_point() {
  return c32_point(m2(0, frac(1, 2), frac(1, 2), 0), m2(frac(1, 2), frac(1, 2), 0, frac(1, 2)),
                   m2(frac(1, 2), 0, frac(1, 2), frac(1, 2)));
}
inline RationalMaps size_point_a() { return c32_point(m2(0, 0, 0, 0), m2(0, 0, 0, 1), m2(1, 0, 0, 0)); }
inline RationalMaps size_point_b() { return c32_point(m2(0, 0, 0, 1), m2(0, 0, 0, 0), m2(0, 0, 0, 0)); }

}  // namespace jomatch::testing
