"""Alternating graphs and linear-time alternating reachability."""

from collections import deque

EXISTS = "E"
FORALL = "A"


class AltGraph:
    def __init__(self, source=None, target=None):
        self.kind = {}
        self.succ = {}
        self.source = source
        self.target = target

    def add_vertex(self, v, kind=EXISTS):
        if v not in self.kind:
            self.kind[v] = kind
            self.succ[v] = []
        return v

    def add_edge(self, u, v):
        self.add_vertex(u)
        self.add_vertex(v)
        self.succ[u].append(v)

    @property
    def vertices(self):
        return list(self.kind)

    def edge_count(self):
        return sum(len(s) for s in self.succ.values())

    def to_dot(self):
        names = {v: f"v{i}" for i, v in enumerate(self.kind)}
        lines = ["digraph G {"]
        for v, k in self.kind.items():
            shape = "box" if k == FORALL else "ellipse"
            label = str(v).replace('"', "'")
            lines.append(f'  {names[v]} [shape={shape}, label="{label}"];')
        for u, vs in self.succ.items():
            for v in vs:
                lines.append(f"  {names[u]} -> {names[v]};")
        lines.append("}")
        return "\n".join(lines)


def reach_a(g, source=None, target=None, ops=None):
    """True iff the source alternating-reaches the target.

    Backward marking from the target: an existential vertex is marked once one
    successor is, a universal one once all of its (at least one) successors are.
    """
    source = g.source if source is None else source
    target = g.target if target is None else target
    if source == target:
        return True
    if target not in g.kind or source not in g.kind:
        return False
    pred = {v: [] for v in g.kind}
    need = {}
    for u, vs in g.succ.items():
        uniq = set(vs)
        need[u] = len(uniq)
        for v in uniq:
            pred[v].append(u)
    marked = {target}
    queue = deque([target])
    steps = 0
    while queue:
        v = queue.popleft()
        for u in pred[v]:
            steps += 1
            if u in marked:
                continue
            if g.kind[u] == FORALL:
                need[u] -= 1
                if need[u] > 0:
                    continue
            marked.add(u)
            if u == source:
                if ops is not None:
                    ops.append(steps)
                return True
            queue.append(u)
    if ops is not None:
        ops.append(steps)
    return source in marked


def reach_naive(g, source=None, target=None):
    """Least fixed point computed by plain iteration (reference implementation)."""
    source = g.source if source is None else source
    target = g.target if target is None else target
    good = {target}
    changed = True
    while changed:
        changed = False
        for v, vs in g.succ.items():
            if v in good or not vs:
                continue
            if g.kind[v] == FORALL:
                ok = all(w in good for w in vs)
            else:
                ok = any(w in good for w in vs)
            if ok:
                good.add(v)
                changed = True
    return source in good
