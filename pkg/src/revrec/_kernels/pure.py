"""Pure-Python similarity kernels; fallback when the compiled module is absent."""

import math

BACKEND = "pure"


def cosine(a, b):
    """Cosine similarity between two token->count mappings. 0 if either is empty."""
    if not a or not b:
        return 0.0
    if len(b) < len(a):
        a, b = b, a
    dot = 0.0
    for token, count in a.items():
        other = b.get(token)
        if other:
            dot += count * other
    if dot == 0.0:
        return 0.0
    norm_a = math.sqrt(sum(c * c for c in a.values()))
    norm_b = math.sqrt(sum(c * c for c in b.values()))
    value = dot / (norm_a * norm_b)
    return 1.0 if value > 1.0 else value


def fps_mean(paths_a, paths_b):
    """Mean common-leading-component ratio over all cross pairs of
    pre-split path component tuples. 0 if either list is empty."""
    if not paths_a or not paths_b:
        return 0.0
    total = 0.0
    for fa in paths_a:
        la = len(fa)
        for fb in paths_b:
            lb = len(fb)
            shared = 0
            limit = la if la < lb else lb
            while shared < limit and fa[shared] == fb[shared]:
                shared += 1
            total += shared / (la if la > lb else lb)
    return total / (len(paths_a) * len(paths_b))
