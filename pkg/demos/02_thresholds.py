"""Necessary and sufficient sample sizes for bounded-degree and bounded-edge classes.

For each class we print the information-theoretic lower bound on n (below
which any decoder errs with probability at least one half) and the
achievability bound for the maximum-likelihood decoder.  The gap between
them is the price of the worst case.
"""

from isinglimits import GraphClassSpec, threshold_report

print(f"{'class':<24}{'necessary n':>14}{'sufficient n (known)':>24}{'(unknown)':>16}")
for p in (10, 100, 1000):
    for spec in (GraphClassSpec.degree(p, 3, 0.5), GraphClassSpec.edge(p, 10, 0.5)):
        rep = threshold_report(spec, delta=0.1)
        label = f"{spec.kind} p={p} bound={spec.bound}"
        print(f"{label:<24}{rep.necessary.value:>14.1f}{rep.sufficient['known'].value:>24.4g}"
              f"{rep.sufficient['unknown'].value:>16.4g}")

# The necessary bound is the largest of several terms; which one wins says
# which obstruction dominates: weak single edges, dense cliques or sheer class size.
print("\nterms of the necessary bound, degree class p=1000, d=3")
for lam in (0.1, 0.5, 1.0, 2.0):
    rep = threshold_report(GraphClassSpec.degree(1000, 3, lam), delta=0.1)
    terms = ", ".join(f"{k}={v:.3g}" for k, v in rep.necessary.terms.items())
    print(f"  lam={lam:<4} {terms}")
