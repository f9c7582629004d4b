"""Frozen reference values, derived independently of the package code.

The kernel constants come from high-precision quadrature of the closed-form
normalization integrals with mpmath (see ``test_kernel_constants_oracle``):
for the bump ``phi(r) = exp(-1/(1-4r^2))`` on ``r < 1/2`` and
``psihat = c (phihat(s) - phihat(s/2))``,

    n = 1:  int_0^inf e^{-s} phihat(s) ds = 2 int_0^{1/2} phi(x) / (1 + x^2) dx
    n = 2:  int_0^inf e^{-s} phihat(s) ds = 2 pi int_0^{1/2} phi(r) r / sqrt(1 + r^2) dr

and ``c = -1 / (I(1) - I(1/2))`` with ``I(a)`` the Laplace integral of
``phihat(a s)``.
"""

KERNEL_SCALE = {1: 167.723907187773408628, 2: 381.753652221033102349}

# lambda = (beta^p2 / alpha^p1)^(1/(p2-p1)) for alpha = 1, beta = 2, p1 = 0.8, p2 = 2
LAMBDA_EXAMPLE = 4 ** (1 / 1.2)

# Chebyshev distance to the complement of an 8-cell ring with one cell removed
DISTANCE_MASK = [0, 1, 1, 1, 1, 1, 1, 1]
DISTANCE_EXAMPLE = [0, 1, 2, 3, 4, 3, 2, 1]

# sha256 of corpus item 0 (seed 42, n = 2, N = 64)
CORPUS_HASH_ITEM0 = "a7a22b22cd4afe3fd79e1791d3a4a9b93ca21d1d1ef340ef0d8d068cc0d987c1"

# corpus maxima of the implied constants from the first verified run
# (default config: n = 2, p1 = 0.8, p2 = 2, 50 items, seed 42)
REGRESSION = {
    128: {"C_w": 0.9851280996273866, "C_w_atomic": 14.105614616384665, "C_v": 5.998447700407318},
    64: {"C_w": 0.863011572486593, "C_w_atomic": 12.304081553930773, "C_v": 5.355445421313086},
}
