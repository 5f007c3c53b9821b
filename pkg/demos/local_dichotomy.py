"""Walk through one local instance: hermitian spaces, embeddings, signs, periods."""

import random

from toric_periods import dichotomy as dc
from toric_periods.characters import epsilon_sign_vector
from toric_periods.etale import classify_hermitian_spaces, embedding_classes, omega_vector

rng = random.Random(1)
inst = dc.generate_instance(5, ("u", "1"), "p", rng, compatible=True)
pair = inst.pair
print("E =", pair.E.labels, " K label =", pair.K.label, " n =", pair.n)

eps, values = epsilon_sign_vector(pair, inst.alphas, inst.chi_W, inst.psi_scale)
print("epsilon signs:", eps.signs, " raw:", [f"{v.real:+.3f}{v.imag:+.1e}j" for v in values])

for V in classify_hermitian_spaces(pair.n, pair.K):
    for lam in embedding_classes(pair, V):
        inp = dc.DichotomyInput(pair, lam, V, inst.alphas, inst.beta, inst.chi_V, inst.chi_W, inst.psi_scale)
        res = dc.local_hom_dimension(inp)
        print(f"  V disc {V.disc_sign:+d}  omega {omega_vector(pair, lam).signs}  dim Hom = {res.hom_dimension}")

print("sum over (V, lambda):", inst.sum_check()["total"])
