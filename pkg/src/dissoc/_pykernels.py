"""Reference kernels in numpy / plain Python.

Every function here has a twin with the same signature in the compiled
``_kernels`` extension.  Value sets are bitmasks: bit ``v`` set means the
element ``v`` is present.
"""

import numpy as np

NAME = "python"
MAX_MASK_N = 64


def fanout(left_idx, blocks):
    """Row r of the result is blocks[left_idx[r, 0]] ++ blocks[left_idx[r, 1]] ++ ..."""
    left_idx = np.ascontiguousarray(left_idx, dtype=np.uint8)
    blocks = np.ascontiguousarray(blocks, dtype=np.uint8)
    return blocks[left_idx].reshape(left_idx.shape[0], -1)


def batch_compose(tables, va, vb):
    """out[s, p*Lb + q] = tables[s, va[s, p], vb[s, q]] for a stack of tables."""
    idx = np.arange(tables.shape[0])[:, None, None]
    out = tables[idx, va[:, :, None], vb[:, None, :]]
    return np.ascontiguousarray(out.reshape(tables.shape[0], -1), dtype=np.uint8)


def max_pair_agreement(vectors):
    """Largest number of equal positions over pairs of distinct rows, with the pair."""
    vectors = np.asarray(vectors, dtype=np.uint8)
    m = vectors.shape[0]
    best, bi, bj = -1, -1, -1
    for i in range(m - 1):
        agree = (vectors[i + 1:] == vectors[i]).sum(axis=1)
        j = int(agree.argmax())
        if agree[j] > best:
            best, bi, bj = int(agree[j]), i, i + 1 + j
    return best, bi, bj


def batch_max_agreement(vectors):
    """vectors has shape (tables, products, n**k); returns the per-table maximum."""
    vectors = np.asarray(vectors, dtype=np.uint8)
    n_tab, m, _ = vectors.shape
    best = np.full(n_tab, -1, dtype=np.int64)
    for i in range(m - 1):
        agree = (vectors[:, i + 1:, :] == vectors[:, i:i + 1, :]).sum(axis=2)
        np.maximum(best, agree.max(axis=1), out=best)
    return best


class _MaskProduct:
    def __init__(self, table):
        table = np.asarray(table)
        n = table.shape[0]
        if n > MAX_MASK_N:
            raise ValueError(f"value-set kernels support n <= {MAX_MASK_N}")
        self.n = n
        # row[a][B] = mask of {a ⋄ b : b in B}, built per bit of B on demand
        self.cell = [[1 << int(table[a, b]) for b in range(n)] for a in range(n)]
        self.memo = {}

    def __call__(self, left, right):
        key = (left, right)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = 0
        cell = self.cell
        a = 0
        lm = left
        while lm:
            if lm & 1:
                row = cell[a]
                b = 0
                rm = right
                while rm:
                    if rm & 1:
                        out |= row[b]
                    rm >>= 1
                    b += 1
            lm >>= 1
            a += 1
        self.memo[key] = out
        return out


def prefix_value_masks(word, table):
    """Masks of allvals(word[:m]) for m = 1..len(word), by interval DP."""
    prod = _MaskProduct(table)
    word = [int(w) for w in word]
    length = len(word)
    # span[i][j] = values of word[i:j+1]
    span = [[0] * length for _ in range(length)]
    for i, w in enumerate(word):
        span[i][i] = 1 << w
    for width in range(1, length):
        for i in range(length - width):
            j = i + width
            acc = 0
            row_i = span[i]
            for m in range(i, j):
                acc |= prod(row_i[m], span[m + 1][j])
            row_i[j] = acc
    return [span[0][j] for j in range(length)]


def automaton_closure(init, table):
    """Least fixpoint of V[s][t] |= V[s][m] ⋄ V[m][t] over an ε-free automaton.

    init[s][t] is the mask of letters labelling transitions s -> t; the result
    holds, for each state pair, the values of all bracketings of all words
    spelled along paths from s to t.
    """
    prod = _MaskProduct(table)
    size = len(init)
    v = [[int(x) for x in row] for row in init]
    changed = True
    while changed:
        changed = False
        for s in range(size):
            vs = v[s]
            for m in range(size):
                left = vs[m]
                if not left:
                    continue
                vm = v[m]
                for t in range(size):
                    right = vm[t]
                    if right:
                        new = vs[t] | prod(left, right)
                        if new != vs[t]:
                            vs[t] = new
                            changed = True
    return v
