"""Alpha-mixing of finite Markov chains and a process that never mixes.

Run: python demos/mixing_chains.py
"""

from momentclt.clt_harness import alpha_bruteforce, mixing_profile, verify_mixing_lemma
from momentclt.processes import make_markov_chain, nonmixing_witness

sticky = make_markov_chain([[0.9, 0.1], [0.2, 0.8]], values=[-1.0, 1.0])
profile = mixing_profile(sticky, gaps=range(1, 8))
print("window alpha for a sticky two-state chain (second eigenvalue 0.7):")
for d, a in profile.alphas.items():
    print(f"  d={d}: {a:.6f}")

frozen = make_markov_chain([[1.0, 0.0], [0.0, 1.0]])
print("\na frozen chain never forgets its start: alpha =", alpha_bruteforce(frozen, [1], [50]))

rep = verify_mixing_lemma(sticky, [[1, 2], [5], [8, 9]])
print(f"\n|E Y1 Y2 Y3 - E Y1 E Y2 E Y3| for three window sums: {rep.lhs:.4e}")
print(f"bound 24 M sum sqrt(alpha) with M={rep.moment_cap:.1f}: {rep.rhs:.4f}")

print("\ndigit process: P(A and B) - P(A)P(B) at every distance =", nonmixing_witness(), "=", float(nonmixing_witness()))
print("d=1000 gives the same value:", nonmixing_witness(d=1000))
