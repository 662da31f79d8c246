# Scratch: histories, simulator, oracle (not shipped).
from xenorec import *
from xenorec.io import parse_gene_tree, parse_timed_species_tree, serialize_gene_tree
from xenorec.simulate import (HistoryNode, TrueHistory, TimedSpeciesTree,
                              observable_part, simulate, ScenarioConfig, Unobservable)
from xenorec.oracle import (check_theorem_equivalence, exists_map_bruteforce,
                            enumerate_species_trees, double_factorial_count,
                            exists_map_exhaustive)
from xenorec.build import is_consistent
from xenorec.triples import species_triples, Triple, TripleSet
from xenorec.reconcile import plant, construct_map, validate_map

print("== apostrophe names ==")
g = parse_gene_tree("((a@A,a'@A)[&ev=d],c''@C)[&ev=s];")
print("parsed genes:", sorted(g.genes))

print()
print("== Fig 6 handcrafted history ==")
sp6 = parse_timed_species_tree("((B:1,C:1)v:1,A:2)r;")
stree = sp6.tree
r = stree.root
v = [x for x in stree.vertices() if not stree.is_leaf(x) and x != r][0]
A = stree.vertex_of("A"); B = stree.vertex_of("B"); C = stree.vertex_of("C")
N = HistoryNode
nodes = {
    0: N(0, None, "d", 2.5, (None, r)),
    1: N(1, 0, "s", 2.0, r),
    2: N(2, 1, "x", 1.7, (r, A)),
    3: N(3, 1, "s", 1.0, v),
    4: N(4, 3, "d", 0.8, (v, B)),
    5: N(5, 4, "o", 0.0, B),
    6: N(6, 3, "o", 0.0, C),
    7: N(7, 4, "t", 0.5, (v, B), transfer_child=9),
    8: N(8, 7, "x", 0.3, (v, B)),
    9: N(9, 7, "o", 0.0, A),
    10: N(10, 0, "s", 2.0, r),
    11: N(11, 10, "o", 0.0, A),
    12: N(12, 10, "s", 1.0, v),
    13: N(13, 12, "o", 0.0, B),
    14: N(14, 12, "o", 0.0, C),
}
names = {5: "b", 6: "c", 9: "a", 11: "a'", 13: "b'", 14: "c'"}
h6 = TrueHistory(sp6, nodes, 0, gene_names=names)
h6.validate()
obs6 = observable_part(h6)
print("observable:", not isinstance(obs6, Unobservable))
print("serialized:", serialize_gene_tree(obs6))
print("S:", species_triples(obs6))
print("no transfer edges (hidden):", obs6.transfer_edges == ())

print()
print("== Fig 1/3 handcrafted history ==")
sp3 = parse_timed_species_tree("((A:2,(B:1,C:1)v:1)rho:1,E:3)R;")
st = sp3.tree
R = st.root
rho = st.lca_labels(["A", "B"])
vv = st.lca_labels(["B", "C"])
A = st.vertex_of("A"); B = st.vertex_of("B"); C = st.vertex_of("C"); E = st.vertex_of("E")
nodes = {
    0: N(0, None, "s", 3.0, R),
    1: N(1, 0, "s", 2.0, rho),          # wA
    2: N(2, 0, "o", 0.0, E),            # e
    3: N(3, 1, "o", 0.0, A),            # a'
    4: N(4, 1, "d", 1.5, (rho, vv)),    # z
    5: N(5, 4, "s", 1.0, vv),           # s1
    6: N(6, 5, "o", 0.0, B),            # b'
    7: N(7, 5, "o", 0.0, C),            # c'
    8: N(8, 4, "s", 1.0, vv),           # wx (suppressed)
    9: N(9, 8, "x", 0.9, (vv, B)),
    10: N(10, 8, "t", 0.7, (vv, C), transfer_child=12),   # z2
    11: N(11, 10, "d", 0.5, (vv, C)),   # q
    12: N(12, 10, "d", 0.6, (rho, A)),  # h (transferred)
    13: N(13, 11, "o", 0.0, C),         # c
    14: N(14, 11, "o", 0.0, C),         # c''
    15: N(15, 12, "o", 0.0, A),         # a
    16: N(16, 12, "t", 0.4, (rho, A), transfer_child=18),  # hidden
    17: N(17, 16, "x", 0.3, (rho, A)),
    18: N(18, 16, "o", 0.0, B),         # b
}
names3 = {2: "e", 3: "a'", 6: "b'", 7: "c'", 13: "c", 14: "c''", 15: "a", 18: "b"}
h3 = TrueHistory(sp3, nodes, 0, gene_names=names3)
h3.validate()
obs3 = observable_part(h3)
print("observable:", not isinstance(obs3, Unobservable))
print("serialized:", serialize_gene_tree(obs3))
rep = check_observability(obs3, restricted=True)
print("passes O1-O3 + O3A:", rep.ok)
print("S:", species_triples(obs3))

print()
print("== oracle sanity ==")
print("counts:", [double_factorial_count(n) for n in (3, 4, 5, 6)])
print("enum binary n=4:", sum(1 for _ in enumerate_species_trees("ABCD")))
print("enum all n=4:", sum(1 for _ in enumerate_species_trees("ABCD", binary_only=False)))
fig2 = parse_gene_tree("((a@A,c1@C)v[&ev=s],(#T(b@B,c2@C)w[&ev=s],d@D)x[&ev=t])rho[&ev=s];")
print("fig2 equivalence:", check_theorem_equivalence(fig2))
fig6 = parse_gene_tree("(((a@A,b@B)[&ev=d],c@C)w1[&ev=s],(a'@A,(b'@B,c'@C)w3[&ev=s])w2[&ev=s])[&ev=d];")
print("fig6 equivalence:", check_theorem_equivalence(fig6))
print("fig6 exists:", exists_map_bruteforce(fig6)[0])
fig3p = parse_gene_tree("(a'@A,e@E,((b'@B,c'@C)s1[&ev=s],((c@C,c''@C)q[&ev=d],#T(a@A,b@B)h[&ev=d])z2[&ev=t])z[&ev=d])w[&ev=s];")
print("fig3' restricted equivalence:", check_theorem_equivalence(fig3p, restricted=True))
ok, wit = exists_map_bruteforce(fig3p, restricted=False)
print("fig3' plain map exists (Thm-2 fails for non-binary):", ok,
      "while consistent =", is_consistent(species_triples(fig3p), labels=fig3p.species))

print()
print("== simulator smoke ==")
sp = parse_timed_species_tree("(((A:1,B:1):1,C:2):1,D:3);")
n_obs = 0
n_unobs = 0
for seed in range(30):
    cfg = ScenarioConfig(dup_rate=0.3, hgt_rate=0.3, loss_rate=0.3, seed=seed)
    hist = simulate(sp, cfg)
    hist.validate()
    res = observable_part(hist)
    if isinstance(res, Unobservable):
        n_unobs += 1
    else:
        n_obs += 1
        assert check_observability(res).ok
print(f"30 seeds: {n_obs} observable, {n_unobs} filtered")
cfg = ScenarioConfig(dup_rate=0.3, hgt_rate=0.3, loss_rate=0.3, seed=7)
h1 = simulate(sp, cfg)
h2 = simulate(sp, cfg)
print("determinism:", serialize_gene_tree(observable_part(h1)) == serialize_gene_tree(observable_part(h2)))

# HGT-free regime
okc = 0
for seed in range(20):
    cfg = ScenarioConfig(dup_rate=0.4, hgt_rate=0.0, loss_rate=0.3, seed=seed)
    res = observable_part(simulate(sp, cfg))
    if isinstance(res, Unobservable):
        print("UNEXPECTED unobservable in HGT-free", seed, res.report)
        continue
    stp = species_triples(res)
    okc += is_consistent(stp, labels=res.species)
print("HGT-free consistent fraction:", okc, "/ 20 (expect 20)")

# equivalence on simulated instances
neq = 0
tested = 0
for seed in range(40):
    cfg = ScenarioConfig(dup_rate=0.3, hgt_rate=0.4, loss_rate=0.3, seed=100 + seed, max_genes=8)
    try:
        res = observable_part(simulate(sp, cfg))
    except SimulationError:
        continue
    if isinstance(res, Unobservable) or not res.is_binary():
        continue
    tested += 1
    if not check_theorem_equivalence(res):
        neq += 1
        print("EQUIVALENCE FAILURE seed", seed, serialize_gene_tree(res))
print(f"equivalence: {tested} tested, {neq} failures")
