"""The Cantor function: its change over [0, 1] is all residue and no integral."""
from gaugeint.corpus.cantor import cantor_function
from gaugeint.corpus.problems import builtin_problem
from gaugeint.decomposition import decompose
from gaugeint.residue import cantor_level_sums

for x in (0.0, 0.25, 1 / 3, 0.5, 2 / 3, 0.75, 1.0):
    print(f"C({x:.6f}) = {cantor_function(x):.12f}")

print("\nlevel sums over the 2^n level-n cells (n = 1..20):")
sums = cantor_level_sums(20)
print("  " + " ".join(f"{s:.1f}" for s in sums))
print(f"  max |S_n - 1| = {max(abs(s - 1) for s in sums):.1e}")

removed = sum(2**n / 3 ** (n + 1) for n in range(200))
print(f"\ntotal length of the removed middle thirds: {removed:.15f}")

r = decompose(builtin_problem("cantor"))
print(f"\ndelta_F = {r.delta_F}, riemann part = {r.riemann.value}, residue sum = {r.residue.value!r}")
print(f"identity gap {r.identity_gap:.1e}: {r.verdict}")
