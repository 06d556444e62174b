"""
Exact arithmetic in a tower of finite fields
============================================

Build F_2 <= F_8 <= F_64, do arithmetic on packed integers, and walk the
trace / norm maps between the levels.
"""

from linsetlab import build_tower

# the tower F_{q^n} with q = p^e: here p = 2, e = 1, n = 6, so q = 2 and
# the big field has 64 elements; elements are packed integers whose base-p
# digits are the polynomial coordinates over F_p
t = build_tower(2, 1, 6)
print("field:", f"GF({t.order})", "modulus digits:", t.modulus)

# packed representation round trip: digits are little-endian base-p
a = t.from_coeffs([1, 0, 1, 1]).val        # 1 + x^2 + x^3
print("packed value of 1 + x^2 + x^3:", a)
print("digits back:", t.coeffs_of(a))

# arithmetic is exact; pow/inv run on discrete-log tables for small fields
b = t.mul(a, a)
print("a*a =", b, " a^2 via pow =", t.pow(a, 2), " a*inv(a) =",
      t.mul(a, t.inv(a)))

# Frobenius x -> x^q generates the Galois group
print("frobenius orbit of a:", [t.frobenius(a, i) for i in range(t.n)])

# trace and norm down to an intermediate field F_{q^d} for every divisor d
for d in (1, 2, 3):
    tr = t.trace_to(a, d)
    nm = t.norm_to(a, d)
    print(f"trace to F_{t.q ** d}: {tr}  norm: {nm}  "
          f"(both live in the subfield: {t.in_subfield(tr, d)}, "
          f"{t.in_subfield(nm, d)})")

# each subfield is enumerable, and q_coords writes elements over the
# degree-n basis 1, x, x^2, ... of F_{q^n} over F_q
print("F_4 inside F_64:", t.subfield_elements(2))
print("q-coordinates of a:", t.q_coords(a))
