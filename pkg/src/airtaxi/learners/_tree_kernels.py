"""Compiled kernels for binary decision trees.

Two split criteria share one builder: weighted entropy (classification,
``mode=0``) and weighted squared error (regression, ``mode=1``). Rows with
zero weight are ignored, so bootstrap and subsample draws are passed as
integer weights rather than copies of the data.

Candidate thresholds are midpoints between consecutive distinct values of
a feature in the node; rows with ``x <= threshold`` go left. Among equal
gains the lowest feature index, then the lowest threshold, wins.
"""
import numpy as np
from numba import njit

CLASSIFY = 0
REGRESS = 1
_TIE_EPS = 1e-12


@njit(cache=True)
def entropy_bits(counts, total):
    h = 0.0
    if total <= 0.0:
        return 0.0
    for c in range(counts.shape[0]):
        if counts[c] > 0.0:
            p = counts[c] / total
            h -= p * np.log2(p)
    return h


@njit(cache=True)
def _split_classify(X, y, w, idx, start, end, feats, n_classes, min_leaf):
    n = end - start
    parent = np.zeros(n_classes)
    total = 0.0
    for k in range(start, end):
        i = idx[k]
        parent[y[i]] += w[i]
        total += w[i]
    h_parent = entropy_bits(parent, total)
    best_gain = -1.0
    best_f = -1
    best_t = 0.0
    vals = np.empty(n)
    left = np.empty(n_classes)
    right = np.empty(n_classes)
    for f in feats:
        for k in range(n):
            vals[k] = X[idx[start + k], f]
        order = np.argsort(vals, kind="mergesort")
        left[:] = 0.0
        wl = 0.0
        for k in range(n - 1):
            i = idx[start + order[k]]
            left[y[i]] += w[i]
            wl += w[i]
            v = vals[order[k]]
            vn = vals[order[k + 1]]
            if not vn > v:
                continue
            wr = total - wl
            if wl < min_leaf or wr < min_leaf:
                continue
            for c in range(n_classes):
                right[c] = parent[c] - left[c]
            gain = h_parent - (wl / total) * entropy_bits(left, wl) \
                - (wr / total) * entropy_bits(right, wr)
            if gain > best_gain + _TIE_EPS:
                best_gain = gain
                best_f = f
                t = 0.5 * (v + vn)
                best_t = t if t < vn else v
    return best_f, best_t, best_gain


@njit(cache=True)
def _split_regress(X, r, w, idx, start, end, feats, min_leaf):
    n = end - start
    s_tot = 0.0
    w_tot = 0.0
    for k in range(start, end):
        i = idx[k]
        s_tot += w[i] * r[i]
        w_tot += w[i]
    base = s_tot * s_tot / w_tot
    best_gain = -1.0
    best_f = -1
    best_t = 0.0
    vals = np.empty(n)
    for f in feats:
        for k in range(n):
            vals[k] = X[idx[start + k], f]
        order = np.argsort(vals, kind="mergesort")
        sl = 0.0
        wl = 0.0
        for k in range(n - 1):
            i = idx[start + order[k]]
            sl += w[i] * r[i]
            wl += w[i]
            v = vals[order[k]]
            vn = vals[order[k + 1]]
            if not vn > v:
                continue
            wr = w_tot - wl
            if wl < min_leaf or wr < min_leaf:
                continue
            sr = s_tot - sl
            gain = sl * sl / wl + sr * sr / wr - base
            if gain > best_gain + _TIE_EPS:
                best_gain = gain
                best_f = f
                t = 0.5 * (v + vn)
                best_t = t if t < vn else v
    return best_f, best_t, best_gain


@njit(cache=True)
def best_split_kernel(X, y, target, w, idx, feats, n_classes, mode, min_leaf):
    if mode == CLASSIFY:
        return _split_classify(X, y, w, idx, 0, idx.shape[0], feats, n_classes, min_leaf)
    return _split_regress(X, target, w, idx, 0, idx.shape[0], feats, min_leaf)


@njit(cache=True)
def build_tree(X, y, target, w, n_classes, mode, max_depth, min_gain, min_leaf, mtry, seed):
    """Grow a tree depth-first; ``max_depth < 0`` means unlimited.

    Returns ``(feature, threshold, left, right, value, n_nodes)``; leaves have
    ``feature == -1``. ``value`` rows hold normalized weighted class shares
    (classification) or the weighted mean target (regression, column 0).
    """
    n_rows, n_feat = X.shape
    np.random.seed(seed)
    n_active = 0
    for i in range(n_rows):
        if w[i] > 0.0:
            n_active += 1
    idx = np.empty(n_active, dtype=np.int64)
    j = 0
    for i in range(n_rows):
        if w[i] > 0.0:
            idx[j] = i
            j += 1

    cap = 2 * max(n_active, 1) + 1
    n_out = n_classes if mode == CLASSIFY else 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros((cap, n_out))

    st_node = np.empty(cap, dtype=np.int64)
    st_start = np.empty(cap, dtype=np.int64)
    st_end = np.empty(cap, dtype=np.int64)
    st_depth = np.empty(cap, dtype=np.int64)
    top = 0
    st_node[0] = 0
    st_start[0] = 0
    st_end[0] = n_active
    st_depth[0] = 0
    top = 1
    n_nodes = 1
    use_all = mtry >= n_feat
    all_feats = np.arange(n_feat)
    scratch = np.empty(n_active, dtype=np.int64)

    while top > 0:
        top -= 1
        node = st_node[top]
        s = st_start[top]
        e = st_end[top]
        depth = st_depth[top]

        wsum = 0.0
        for k in range(s, e):
            i = idx[k]
            wsum += w[i]
            if mode == CLASSIFY:
                value[node, y[i]] += w[i]
            else:
                value[node, 0] += w[i] * target[i]
        if wsum > 0.0:
            for c in range(n_out):
                value[node, c] /= wsum

        if (max_depth >= 0 and depth >= max_depth) or wsum < 2.0 * min_leaf or e - s < 2:
            continue
        if mode == CLASSIFY:
            pure = False
            for c in range(n_out):
                if value[node, c] >= 1.0:
                    pure = True
            if pure:
                continue

        if use_all:
            feats = all_feats
        else:
            feats = np.sort(np.random.permutation(n_feat)[:mtry])
        if mode == CLASSIFY:
            f, t, gain = _split_classify(X, y, w, idx, s, e, feats, n_classes, min_leaf)
        else:
            f, t, gain = _split_regress(X, target, w, idx, s, e, feats, min_leaf)
        if f < 0 or gain < min_gain:
            continue

        # stable partition: x <= t to the left
        nl = 0
        for k in range(s, e):
            if X[idx[k], f] <= t:
                scratch[nl] = idx[k]
                nl += 1
        m = nl
        for k in range(s, e):
            if X[idx[k], f] > t:
                scratch[m] = idx[k]
                m += 1
        for k in range(e - s):
            idx[s + k] = scratch[k]

        feature[node] = f
        threshold[node] = t
        lc = n_nodes
        rc = n_nodes + 1
        n_nodes += 2
        left[node] = lc
        right[node] = rc
        st_node[top] = rc
        st_start[top] = s + nl
        st_end[top] = e
        st_depth[top] = depth + 1
        top += 1
        st_node[top] = lc
        st_start[top] = s
        st_end[top] = s + nl
        st_depth[top] = depth + 1
        top += 1

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), value[:n_nodes].copy(), n_nodes)


@njit(cache=True)
def apply_tree(X, feature, threshold, left, right):
    """Leaf index reached by every row of ``X``."""
    n = X.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


@njit(cache=True)
def forest_votes(X, features, thresholds, lefts, rights, leaf_class, offsets, n_classes):
    """Hard-vote tally over trees packed end to end in flat arrays."""
    n = X.shape[0]
    votes = np.zeros((n, n_classes))
    n_trees = offsets.shape[0] - 1
    for t in range(n_trees):
        o = offsets[t]
        for i in range(n):
            node = 0
            while features[o + node] >= 0:
                if X[i, features[o + node]] <= thresholds[o + node]:
                    node = lefts[o + node]
                else:
                    node = rights[o + node]
            votes[i, leaf_class[o + node]] += 1.0
    return votes
