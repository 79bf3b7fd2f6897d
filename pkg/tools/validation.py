import numpy as np

from core.graph import EPSILON, reachable


def _violation(name, location):
    return {"ok": False, "violation": name, "location": location}


def _check_offsets(offset, num_nodes, num_arcs, name):
    if offset.shape != (num_nodes + 1,):
        return _violation("offset length mismatch", f"{name} has {offset.size} entries, expected {num_nodes + 1}")
    if offset[0] != 0:
        return _violation("offset sum mismatch", f"{name}[0] = {int(offset[0])}")
    if offset[num_nodes] != num_arcs:
        return _violation("offset sum mismatch", f"{name}[{num_nodes}] = {int(offset[num_nodes])}, E = {num_arcs}")
    steps = np.diff(offset)
    if (steps < 0).any():
        v = int(np.flatnonzero(steps < 0)[0])
        return _violation("offset not monotone", f"{name}[{v}] > {name}[{v + 1}]")
    return None


def _check_adjacency(adjacency, offset, endpoints, num_arcs, name, mismatch):
    if adjacency.shape != (num_arcs,) or not np.array_equal(np.sort(adjacency), np.arange(num_arcs)):
        return _violation("adjacency not a permutation", name)
    owner = np.repeat(np.arange(offset.size - 1), np.diff(offset))
    wrong = endpoints[adjacency] != owner
    if wrong.any():
        i = int(np.flatnonzero(wrong)[0])
        return _violation(mismatch, f"{name}[{i}] = arc {int(adjacency[i])} in span of node {int(owner[i])}")
    return None


def validate(g):
    """
    Check every Graph invariant.
    Returns {"ok": True} or the first violation with its location.
    """
    num_nodes = g.start.size
    num_arcs = g.ilabels.size

    if g.accept.shape != (num_nodes,):
        return _violation("flag length mismatch", f"accept has {g.accept.size} entries for {num_nodes} nodes")
    for name in ("olabels", "weights", "src_nodes", "dst_nodes"):
        if getattr(g, name).shape != (num_arcs,):
            return _violation("arc array length mismatch", name)

    for name in ("src_nodes", "dst_nodes"):
        nodes = getattr(g, name)
        bad = (nodes < 0) | (nodes >= num_nodes)
        if bad.any():
            return _violation("node index out of range", f"{name}[{int(np.flatnonzero(bad)[0])}]")
    for name in ("ilabels", "olabels"):
        bad = getattr(g, name) < EPSILON
        if bad.any():
            return _violation("label below epsilon", f"{name}[{int(np.flatnonzero(bad)[0])}]")

    for offset, name in ((g.in_arc_offset, "in_arc_offset"), (g.out_arc_offset, "out_arc_offset")):
        report = _check_offsets(offset, num_nodes, num_arcs, name)
        if report:
            return report

    report = _check_adjacency(g.in_arcs, g.in_arc_offset, g.dst_nodes, num_arcs,
                              "in_arcs", "adjacency/destination mismatch")
    if report:
        return report
    report = _check_adjacency(g.out_arcs, g.out_arc_offset, g.src_nodes, num_arcs,
                              "out_arcs", "adjacency/source mismatch")
    if report:
        return report

    return {"ok": True}


def check_trim(g):
    """Every node must be reachable from a start and able to reach an accept."""
    forward = reachable(g, g.starts(), forward=True)
    if not forward.all():
        return _violation("not accessible", f"node {int(np.flatnonzero(~forward)[0])}")
    backward = reachable(g, g.accepts(), forward=False)
    if not backward.all():
        return _violation("not co-accessible", f"node {int(np.flatnonzero(~backward)[0])}")
    return {"ok": True}
