"""
Classifying a pair of subspaces with the same linear set
========================================================

Two graphs can carry one linear set for boring reasons (scalar multiple,
perp of a scalar multiple) or exotic ones at composite n: swapping the
inner component of a generalized construction by its d-perp or by an
inner pseudoregulus partner.  classify_pair names the case and
replay_verdict re-verifies the witness from scratch.
"""

from linsetlab import (
    DicksonMatrix,
    LinearizedPolynomial,
    build_tower,
    classify_pair,
    construct_generalized,
    generalized_partner,
    replay_verdict,
    sets_equal,
)

# boring case first: a twist is a scalar multiple of the graph
t5 = build_tower(2, 1, 5)
f = LinearizedPolynomial(t5, [0, 1, 1, 0, 0])
g = f.twist(7)
v = classify_pair(f, g)
print("twisted pair ->", v.case, "witness:", v.witness)
print("replay:", replay_verdict(f, g, v))

# one point set, many exponents: c*x + x^(q^i) cuts out the same set for
# every i coprime to 5; the witness presents each graph by two generators
# v0, v1 with graph = {lam*v0 + lam^(q^i)*v1}
h1 = LinearizedPolynomial(t5, [14, 1, 0, 0, 0])
h2 = LinearizedPolynomial(t5, [14, 0, 1, 0, 0])
v = classify_pair(h1, h2)
print("\ntranslated binomials ->", v.case)
print("exponents:", v.witness["i"], v.witness["j"],
      "generators:", v.witness["f_v0"], v.witness["f_v1"])
print("replay:", replay_verdict(h1, h2, v))

# exotic case: (2, 6) with inner dimension d = 3, outer part zeta*x^(q^3)
# with zeta outside F_8, inner coefficients (0, 1, 0); the perp_d partner
# has the same linear set but is no scalar or perp multiple
t = build_tower(2, 1, 6)
zeta = next(c for c in range(2, t.order) if not t.in_subfield(c, 3))
fprime = LinearizedPolynomial.monomial(t, zeta, 3)
U = construct_generalized(fprime, [0, 1, 0], 1, 3)
W = generalized_partner(U, 3, 1, mode="perp_d")
print("\nequal sets:", sets_equal(U, W, verify=True))

fU, gW = U.as_graph_poly(), W.as_graph_poly()
A, B = DicksonMatrix.from_poly(fU), DicksonMatrix.from_poly(gW)
print("scalar multiple?", A.diag_similar(B) is not None)
print("perp multiple?", A.diag_similar(B.transpose()) is not None)

verdict = classify_pair(fU, gW, exhaustive=True)
print("case:", verdict.case, "matched:", verdict.matched)
print("inner case:", verdict.witness["inner_case"])
print("replay:", replay_verdict(fU, gW, verdict))

# the same machinery at (2, 10), d = 5: swap the inner exponent 1 for 2
t10 = build_tower(2, 1, 10)
U10 = construct_generalized(
    LinearizedPolynomial.zero(t10), [0, 1, 0, 0, 0], 1, 5)
W10 = generalized_partner(U10, 5, 1, mode="pseudoregulus", j=2)
v10 = classify_pair(U10.as_graph_poly(), W10.as_graph_poly())
print("\n(2,10) partner ->", v10.case)
print("replay:", replay_verdict(U10.as_graph_poly(), W10.as_graph_poly(), v10))
