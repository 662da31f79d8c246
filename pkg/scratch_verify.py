# Scratch verification of the figure reconstructions (not shipped).
import sys

from xenorec import *
from xenorec.io import parse_gene_tree, serialize_species_tree, parse_species_tree
from xenorec.reconcile import construct_map, plant, validate_map, reconc_t
from xenorec.timecheck import check_time_consistency, Infeasible, TimeAssignment
from xenorec.triples import informative_triples, species_triples, Triple, displayed_triples
from xenorec.build import build, is_consistent, Inconsistent

def T(*args):
    return Triple.make(*args)

print("== Figure 2 ==")
fig2 = parse_gene_tree("((a@A,c1@C)v[&ev=s],(#T(b@B,c2@C)w[&ev=s],d@D)x[&ev=t])rho[&ev=s];")
rep = check_observability(fig2, restricted=True)
print("observability:", rep.ok, rep)
info = informative_triples(fig2)
print("R0:", info.r0, "== {ac1|d}?", info.r0 == TripleSet([T("a","c1","d")]))
print("R1:", info.per_edge, "== {bc2|d}?", info.per_edge[0] == TripleSet([T("b","c2","d")]))
st = species_triples(fig2)
print("S:", st, "== {AC|D, BC|D}?", st == TripleSet([T("A","C","D"), T("B","C","D")]))
res = reconc_t(fig2, restricted=False)
print("infer ok:", res.ok, "tree:", serialize_species_tree(res.species_tree))
val = validate_map(fig2, res.species_tree, res.map, restricted=True)
print("constructed map valid (restricted):", val.ok)
# R0 computed on the tree itself (transfer edges kept) contains the contradiction
r0_tree = [t for t in displayed_triples(fig2.tree)
           if len({fig2.sigma[t.a], fig2.sigma[t.b], fig2.sigma[t.c]}) == 3
           and fig2.event_of(fig2.tree.lca_labels(t.labels())) == "s"]
print("R0(T) contains ac1|d, c2d|a:", T("a","c1","d") in r0_tree, T("c2","d","a") in r0_tree)

print()
print("== Figure 6 ==")
fig6 = parse_gene_tree("(((a@A,b@B)[&ev=d],c@C)w1[&ev=s],(a2@A,(b2@B,c2@C)w3[&ev=s])w2[&ev=s])[&ev=d];")
rep = check_observability(fig6, restricted=True)
print("observability:", rep.ok)
print("binary:", fig6.is_binary())
st6 = species_triples(fig6)
print("S:", st6, "== {AB|C, BC|A}?", st6 == TripleSet([T("A","B","C"), T("B","C","A")]))
print("consistent:", is_consistent(st6, labels=fig6.species))
res6 = reconc_t(fig6)
print("infer ok:", res6.ok, "(expect False)", "message:", res6.message)

print()
print("== Figure 3 binary T ==")
fig3 = parse_gene_tree(
    "((a2@A,((b2@B,c2@C)s1[&ev=s],((c@C,c3@C)q[&ev=d],#T(a@A,b@B)h[&ev=d])z2[&ev=t])z[&ev=d])wA[&ev=s],e@E)wB[&ev=s];")
rep = check_observability(fig3, restricted=True)
print("observability (incl O3A):", rep.ok, rep.failed_axioms())
print("binary:", fig3.is_binary())
st3 = species_triples(fig3)
print("S:", st3)
core = TripleSet([T("A","B","C"), T("B","C","A")])
print("contains AB|C and BC|A:", core.triples <= st3.triples)
print("consistent:", is_consistent(st3, labels=fig3.species))
res3 = reconc_t(fig3, restricted=True)
print("restricted infer ok:", res3.ok, "(expect False)")

print()
print("== Figure 3 non-binary T' ==")
fig3p = parse_gene_tree(
    "(a2@A,e@E,((b2@B,c2@C)s1[&ev=s],((c@C,c3@C)q[&ev=d],#T(a@A,b@B)h[&ev=d])z2[&ev=t])z[&ev=d])w[&ev=s];")
rep = check_observability(fig3p, restricted=True)
print("observability (incl O3A):", rep.ok, rep.failed_axioms())
print("non-binary:", not fig3p.is_binary())
st3p = species_triples(fig3p)
print("S:", st3p)
print("contains AB|C and BC|A:", core.triples <= st3p.triples)
print("consistent:", is_consistent(st3p, labels=fig3p.species))
res3p = reconc_t(fig3p, restricted=True)
print("restricted infer ok:", res3p.ok, "(expect False)")
# fixture map to S_fix = (((A,B),C),E)
sfix = plant(parse_species_tree("(((A,B)ab,C)abc,E)r;"))
mu = construct_map(fig3p, sfix)
plain = validate_map(fig3p, sfix, mu, restricted=False)
print("fixture map passes plain validation:", plain.ok)
restr = validate_map(fig3p, sfix, mu, restricted=True)
print("fixture map fails M2.iv:", not restr.ok, "violations:", restr.m2iv)
gnames = {v: fig3p.tree.name_of(v) or fig3p.tree.label_of(v) if fig3p.tree.is_leaf(v) or fig3p.tree.name_of(v) else v for v in fig3p.tree.vertices()}
print("M2.iv violators (vertex, child, child):",
      [(fig3p.tree.name_of(v), gnames.get(a, a), gnames.get(b, b)) for (v, a, b) in restr.m2iv])

print()
print("== Figure 4 ==")
fig4 = parse_gene_tree(
    "(((c@C,#T(d1@D,#T(a@A,b@B)w[&ev=s])u2[&ev=t])u[&ev=t],a3@A)w5[&ev=s],(d2@D,#T(a2@A,c2@C)w4[&ev=s])u3[&ev=t])rho[&ev=s];")
rep = check_observability(fig4, restricted=True)
print("observability:", rep.ok, rep.failed_axioms())
print("binary:", fig4.is_binary())
st4 = species_triples(fig4)
want4 = TripleSet([T("A","B","D"), T("A","C","D")])
print("S:", st4, "== {AB|D, AC|D}?", st4 == want4)
res4 = reconc_t(fig4)
print("infer ok:", res4.ok)
S4 = res4.species_tree
print("BUILD tree:", serialize_species_tree(S4), "(expect ((A,B,C),D) shape)")
tc = check_time_consistency(fig4, S4, res4.map)
print("least-resolved tree time-check infeasible:", isinstance(tc, Infeasible))
if isinstance(tc, Infeasible):
    for arc in tc.cycle:
        print("   ", arc.src, "->", arc.dst, arc.kind)
# refined tree
for refined_newick in ["(((A,B),C),D);", "(((A,C),B),D);", "(((B,C),A),D);"]:
    Sr = plant(parse_species_tree(refined_newick))
    mur = construct_map(fig4, Sr)
    vr = validate_map(fig4, Sr, mur)
    tcr = check_time_consistency(fig4, Sr, mur) if vr.ok else None
    verdict = ("feasible" if isinstance(tcr, TimeAssignment) else
               "infeasible" if isinstance(tcr, Infeasible) else "map-invalid")
    print(f"refinement {refined_newick}: map valid={vr.ok}, time {verdict}")
    if isinstance(tcr, TimeAssignment):
        print("   witness re-check:", tcr.satisfies(fig4, Sr, mur))
