"""
Line-oriented text format:

    nodes <V>
    start <v>            (repeatable)
    accept <v>           (repeatable)
    arc <src> <dst> <ilabel> <olabel> <weight>

'#' starts a comment. `nodes` must come before every other directive.
"""

from core.errors import TextFormatError
from core.graph import EPSILON, Arc, build_graph

_ARITY = {'nodes': 1, 'start': 1, 'accept': 1, 'arc': 5}


def _int(token, line_number, what):
    try:
        return int(token)
    except ValueError:
        raise TextFormatError(line_number, f"{what} must be an integer, got {token!r}")


def _node(token, num_nodes, line_number):
    v = _int(token, line_number, 'node')
    if not 0 <= v < num_nodes:
        raise TextFormatError(line_number, f"node {v} out of range")
    return v


def read_text(stream):
    num_nodes = None
    starts, accepts, arcs = [], [], []

    for line_number, raw in enumerate(stream, 1):
        fields = raw.split('#', 1)[0].split()
        if not fields:
            continue
        directive, args = fields[0], fields[1:]
        if directive not in _ARITY:
            raise TextFormatError(line_number, f"unknown directive {directive!r}")
        if len(args) != _ARITY[directive]:
            raise TextFormatError(line_number, f"{directive} takes {_ARITY[directive]} field(s), got {len(args)}")

        if directive == 'nodes':
            if num_nodes is not None:
                raise TextFormatError(line_number, "duplicate nodes line")
            num_nodes = _int(args[0], line_number, 'node count')
            if num_nodes < 0:
                raise TextFormatError(line_number, f"negative node count {num_nodes}")
            continue
        if num_nodes is None:
            raise TextFormatError(line_number, f"{directive} before nodes line")

        if directive == 'start':
            starts.append(_node(args[0], num_nodes, line_number))
        elif directive == 'accept':
            accepts.append(_node(args[0], num_nodes, line_number))
        else:
            src = _node(args[0], num_nodes, line_number)
            dst = _node(args[1], num_nodes, line_number)
            ilabel = _int(args[2], line_number, 'ilabel')
            olabel = _int(args[3], line_number, 'olabel')
            if ilabel < EPSILON or olabel < EPSILON:
                raise TextFormatError(line_number, f"label below {EPSILON}")
            try:
                weight = float(args[4])
            except ValueError:
                raise TextFormatError(line_number, f"weight must be a number, got {args[4]!r}")
            arcs.append(Arc(src, dst, ilabel, olabel, weight))

    if num_nodes is None:
        raise TextFormatError(0, "missing nodes line")
    return build_graph(num_nodes, starts, accepts, arcs)


def write_text(g, stream):
    """Write g with arcs in arc-index order; weights as shortest float32 repr."""
    stream.write(f"nodes {g.num_nodes}\n")
    for v in g.starts():
        stream.write(f"start {v}\n")
    for v in g.accepts():
        stream.write(f"accept {v}\n")
    for e in range(g.num_arcs):
        stream.write(
            f"arc {g.src_nodes[e]} {g.dst_nodes[e]} {g.ilabels[e]} {g.olabels[e]} {g.weights[e]}\n"
        )


def load_graph(path):
    with open(path, 'r', encoding='utf-8') as f:
        return read_text(f)


def save_graph(g, path):
    with open(path, 'w', encoding='utf-8') as f:
        write_text(g, f)
