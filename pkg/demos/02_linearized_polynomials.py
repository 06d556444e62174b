"""
Linearized polynomials and their Dickson matrices
=================================================

A q-polynomial f(x) = sum a_i x^(q^i) is an F_q-linear map on F_{q^n}.
Its n x n Dickson matrix carries the rank, the adjoint is the matrix
transpose, and the tuple of principal minors fingerprints the graph.
"""

from linsetlab import DicksonMatrix, LinearizedPolynomial, build_tower

t = build_tower(2, 1, 4)

# f(x) = x^q + x^(q^2), written by its coefficient vector (index i <-> q^i)
f = LinearizedPolynomial(t, [0, 1, 1, 0])
print("coeffs:", f.coeffs, "support:", f.support)

# evaluation is plain Frobenius arithmetic
print("values on a few points:", [f.evaluate(v) for v in (1, 2, 3, 7)])

# the induced map's rank, here deficient: the kernel is nontrivial
print("map rank:", f.map_rank(), "of", t.n)

# the Dickson matrix A[i][j] = a_(j-i)^(q^i); its rank equals map_rank,
# and rank_leading reads it off the leading principal minors alone
A = DicksonMatrix.from_poly(f)
for row in A.rows():
    print(" ", row)
print("rank_leading:", A.rank_leading())

# the adjoint polynomial satisfies Tr(y f(x)) = Tr(fhat(y) x) and its
# matrix is exactly the transpose
fhat = f.adjoint()
print("adjoint coeffs:", fhat.coeffs)
print("adjoint matrix is A^T:",
      DicksonMatrix.from_poly(fhat).rows() == A.transpose().rows())

# twisting by lam scales the graph by 1/lam: a scalar change of the same
# linear set; diag_similar recovers the scalar from the two matrices
g = f.twist(t.x_int)
B = DicksonMatrix.from_poly(g)
print("diag_similar recovers the twist:", A.diag_similar(B) is not None)

# the fingerprint lists all 2^n principal minors; equal fingerprints of
# graph matrices mean equal linear sets, and digest is a stable 64-bit hash
print("fingerprint head:", A.fingerprint()[:8])
print("digest:", f"{A.digest():016x}", "(matches twist:",
      A.digest() == B.digest(), ")")
