#pragma once

#include <string_view>

namespace ghc {

// Every sign used by the graded calculus comes from here.
enum class SignRule {
  InternalHom,         // coefficient of f o Q_V in  df = Q_W f - (-1)^|f| f Q_V      args: |f|
  Shift,               // Q_{V[p]} = (-1)^p Q_V                                       args: p
  Koszul,              // v (x) w -> (-1)^{|v||w|} w (x) v                            args: |v|, |w|
  TensorDifferential,  // Q(v (x) w) = Qv (x) w + (-1)^|v| v (x) Qw                   args: |v|
  MappingHorizontal,   // pr_q dh = sum_k (-1)^k d^{q-k} pr_{q-1}                      args: k
  MappingVertical,     // pr_{q,c} dv = (-1)^q d pr_{q,c}                              args: q
  MappingComposition,  // pr_{q,c}(g o f) = sum_k (-1)^{k(q-k+|g|)} g_{>=k} o f_{<=k}  args: k, q, |g|
  HocolimHorizontal,   // d = -dh + dv, dh iota_q = sum_k (-1)^{-k} iota_{q-1} d_k      args: k
  HocolimVertical,     // dv iota_{q,c} = (-1)^{-q} iota_{q,c} Q                       args: q
  Adjunction,          // iota_{q,c} v -> (-1)^{-qm} (pr_{q,c} eta) v                  args: q, m
  HocolimMorphism,     // (-1)^{-qm + k(q-k)}                                          args: q, m, k
};

constexpr int parity_sign(long k) { return (k % 2 == 0) ? 1 : -1; }

constexpr int sign(SignRule rule, int a = 0, int b = 0, int c = 0) {
  switch (rule) {
    case SignRule::InternalHom: return -parity_sign(a);
    case SignRule::Shift: return parity_sign(a);
    case SignRule::Koszul: return parity_sign(static_cast<long>(a) * b);
    case SignRule::TensorDifferential: return parity_sign(a);
    case SignRule::MappingHorizontal: return parity_sign(a);
    case SignRule::MappingVertical: return parity_sign(a);
    case SignRule::MappingComposition:
      return parity_sign(static_cast<long>(a) * (b - a + c));
    case SignRule::HocolimHorizontal: return -parity_sign(-a);
    case SignRule::HocolimVertical: return parity_sign(-a);
    case SignRule::Adjunction: return parity_sign(-static_cast<long>(a) * b);
    case SignRule::HocolimMorphism:
      return parity_sign(-static_cast<long>(a) * b + static_cast<long>(c) * (a - c));
  }
  return 0;
}

constexpr std::string_view convention(SignRule rule) {
  switch (rule) {
    case SignRule::InternalHom: return "df := Q_W o f - (-1)^n f o Q_V";
    case SignRule::Shift: return "Q_{V[p]}^n := (-1)^p Q_V^{n+p}";
    case SignRule::Koszul: return "v (x) w -> (-1)^{|v||w|} w (x) v";
    case SignRule::TensorDifferential: return "Q(v (x) w) := Qv (x) w + (-1)^{|v|} v (x) Qw";
    case SignRule::MappingHorizontal: return "pr_q o dh := sum_k (-1)^k d^{q-k} o pr_{q-1}";
    case SignRule::MappingVertical: return "pr_{q,c} o dv := (-1)^q d o pr_{q,c}";
    case SignRule::MappingComposition:
      return "pr_{q,c}(g o f) := sum_k (-1)^{k(q-k+n)} pr_{q-k,c>=k} g o pr_{k,c<=k} f";
    case SignRule::HocolimHorizontal: return "d := -dh + dv, dh o iota_q := sum_k (-1)^{-k} iota_{q-1} o d_k";
    case SignRule::HocolimVertical: return "dv o iota_{q,c} := (-1)^{-q} iota_{q,c} o Q";
    case SignRule::Adjunction: return "iota_{q,c} v -> (-1)^{-qm} (pr_{q,c} eta)^{n+q} v";
    case SignRule::HocolimMorphism:
      return "hocolim(eta)(iota_{q,c} v) := sum_k (-1)^{-qm+k(q-k)} iota_{q-k,c>=k}((pr_{k,c<=k} eta) v)";
  }
  return "";
}

}  // namespace ghc
