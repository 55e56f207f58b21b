#pragma once

// Brute-force blade arithmetic: blades as sorted index lists, signs from
// inversion counts of concatenations. Shares nothing with the library's
// bitmask merge tables.

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "projfol/exterior.hpp"

namespace oracle {

using Blade = std::vector<int>;

inline int inversion_sign(const std::vector<int>& seq) {
  int inv = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j) inv += seq[i] > seq[j] ? 1 : 0;
  return inv % 2 ? -1 : 1;
}

/// e_S v e_T as (sign, sorted union); sign 0 when the sets meet.
inline std::pair<int, Blade> wedge(const Blade& s, const Blade& t) {
  std::vector<int> cat = s;
  cat.insert(cat.end(), t.begin(), t.end());
  Blade sorted = cat;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return {0, {}};
  return {inversion_sign(cat), sorted};
}

inline Blade complement(const Blade& s, int dim) {
  Blade c;
  for (int i = 0; i < dim; ++i)
    if (std::find(s.begin(), s.end(), i) == s.end()) c.push_back(i);
  return c;
}

inline std::pair<int, Blade> star(const Blade& s, int dim) {
  const Blade c = complement(s, dim);
  std::vector<int> cat = s;
  cat.insert(cat.end(), c.begin(), c.end());
  return {inversion_sign(cat), c};
}

/// *( *e_S v *e_T )
inline std::pair<int, Blade> regressive(const Blade& s, const Blade& t, int dim) {
  const auto [sa, ca] = star(s, dim);
  const auto [sb, cb] = star(t, dim);
  const auto [sw, w] = wedge(ca, cb);
  if (sw == 0) return {0, {}};
  const auto [ss, c] = star(w, dim);
  return {sa * sb * sw * ss, c};
}

inline std::vector<Blade> all_blades(int dim, int grade) {
  std::vector<Blade> out;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    Blade b;
    for (int i = 0; i < dim; ++i)
      if (mask >> i & 1) b.push_back(i);
    if (static_cast<int>(b.size()) == grade) out.push_back(b);
  }
  return out;
}

inline projfol::KVector make(int dim, const Blade& b) {
  projfol::BladeMask m = 0;
  for (int i : b) m |= static_cast<projfol::BladeMask>(1u << i);
  return projfol::KVector::basis(dim, m);
}

/// Nonzero coefficients keyed by index list.
inline std::map<Blade, projfol::Scalar> terms(const projfol::KVector& k) {
  std::map<Blade, projfol::Scalar> out;
  const projfol::BladeBasis& basis = projfol::BladeBasis::get(k.ambient_dim(), k.grade());
  for (int r = 0; r < k.size(); ++r) {
    if (k[r] != projfol::Scalar(0.0)) out[projfol::blade_indices(basis.mask(r))] = k[r];
  }
  return out;
}

/// Exactly sign * e_b (or exactly zero when sign is 0).
inline bool matches(const projfol::KVector& k, int sign, const Blade& b) {
  const auto t = terms(k);
  if (sign == 0) return t.empty();
  return t.size() == 1 && t.begin()->first == b && t.begin()->second == projfol::Scalar(sign);
}

struct Tally {
  int checked = 0;
  int mismatches = 0;
};

/// Compares wedge, star and regressive products of every pair of basis
/// blades of K^dim with the oracle, requiring exact coefficients.
inline Tally check_all_blades(int dim) {
  Tally t;
  auto note = [&](bool ok) {
    ++t.checked;
    t.mismatches += ok ? 0 : 1;
  };
  for (int k = 0; k <= dim; ++k) {
    for (const Blade& s : all_blades(dim, k)) {
      const auto [ss, sb] = star(s, dim);
      note(matches(projfol::hodge_star(make(dim, s)), ss, sb));
      for (int l = 0; l <= dim; ++l) {
        for (const Blade& u : all_blades(dim, l)) {
          if (k + l <= dim) {
            const auto [ws, wb] = wedge(s, u);
            note(matches(projfol::wedge(make(dim, s), make(dim, u)), ws, wb));
          }
          if (k + l >= dim) {
            const auto [rs, rb] = regressive(s, u, dim);
            note(matches(projfol::regressive(make(dim, s), make(dim, u)), rs, rb));
          }
        }
      }
    }
  }
  return t;
}

}  // namespace oracle
