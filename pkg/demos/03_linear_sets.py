"""
Linear sets on the projective line
==================================

The graph U = {(x, f(x))} of a q-polynomial spans an F_q-linear set of
PG(1, q^n): the projective points hit by nonzero vectors of U, each with
a weight.  Clubs and pseudoregulus-type sets are the classical shapes.
"""

from linsetlab import (
    DicksonMatrix,
    LinearizedPolynomial,
    build_tower,
    construct_club,
    construct_pseudoregulus,
    graph_subspace,
    linear_set,
    perp,
    sets_equal,
    weight,
)

t = build_tower(2, 1, 5)

# a generic graph: points, weights and the weight spectrum
f = LinearizedPolynomial(t, [0, 1, 0, 1, 0])
U = graph_subspace(f)
L = linear_set(U)
print("points:", len(L.points), "spectrum:", L.spectrum())
print("weight of (1, f(1)/1):", weight(U, (1, f.evaluate(1))))

# a club has one heavy point of weight n-1 and q^(n-1) points of weight 1
club = construct_club(t.element(0), t.element(1), t.element(1))
print("club spectrum:", linear_set(club).spectrum())

# a pseudoregulus-type set: graph of a*x^(q^i) with gcd(i, n) = 1; its
# point set only remembers the norm of a
P1 = construct_pseudoregulus(t.element(3), 1)
P2 = construct_pseudoregulus(t.element(5), 3)
print("norms:", t.norm_to(3, 1), t.norm_to(5, 1),
      "-> equal sets:", sets_equal(P1, P2))

# the perp of a graph (orthogonal complement under the trace form) is the
# graph of the adjoint polynomial and always carries the same linear set
Up = perp(U)
print("perp equals adjoint graph:", Up == graph_subspace(f.adjoint()))
print("same linear set:", sets_equal(U, Up))

# weights convert to matrix data: the multiplicity of a as a root of the
# characteristic function is 1 + q + ... + q^(w-1) for w = weight((1, a))
A = DicksonMatrix.from_poly(f)
a = f.evaluate(1)
print("root multiplicity at a:", A.root_multiplicity(a))
