"""Independent oracle for in-order tree labels, paths and minimal covers.

Builds an explicit pointer tree of capacity C (in-order numbering) and derives
everything by traversal, without the label arithmetic the library uses.
Output is the frozen table embedded in test_range_tree.cpp.
"""


class Node:
    def __init__(self, lo, hi):
        self.lo, self.hi = lo, hi
        self.left = self.right = self.parent = None
        self.label = None


def build(lo, hi):
    n = Node(lo, hi)
    if lo != hi:
        mid = (lo + hi) // 2
        n.left, n.right = build(lo, mid), build(mid + 1, hi)
        n.left.parent = n.right.parent = n
    return n


def number(root):
    out, stack, cur, k = [], [], root, 0
    while stack or cur:
        while cur:
            stack.append(cur)
            cur = cur.left
        cur = stack.pop()
        cur.label = k
        out.append(cur)
        k += 1
        cur = cur.right
    return out


def tree(cap):
    root = build(0, cap - 1)
    return root, number(root)


def leaf(nodes, v):
    return next(n for n in nodes if n.lo == n.hi == v)


def path(cap, v):
    _, nodes = tree(cap)
    n, out = leaf(nodes, v), []
    while n:
        out.append(n.label)
        n = n.parent
    return out


def cover(a, b, m):
    cap = 1
    while cap < m:
        cap *= 2
    _, nodes = tree(cap)
    inside = lambda n: a <= n.lo and n.hi <= b
    return sorted(n.label for n in nodes if inside(n) and not (n.parent and inside(n.parent)))


if __name__ == "__main__":
    print("leaf 17 ->", leaf(tree(32)[1], 17).label)
    print("path v=5 C=8 ->", path(8, 5))
    print("path v=0 C=4 ->", path(4, 0))
    print("cover 0..2 m=4 ->", cover(0, 2, 4))
    print("cover 0..3 m=4 ->", cover(0, 3, 4))
    print("cover 3..12 m=13 ->", cover(3, 12, 13))
    print("cover 1..62 m=64 ->", cover(1, 62, 64))
    print("cover 5..5 m=6 ->", cover(5, 5, 6))
    print("spans C=4:", [(n.label, n.lo, n.hi) for n in tree(4)[1]])
    print("root C=8 ->", tree(8)[0].label, " root C=16 ->", tree(16)[0].label)
    print("max_safe y=6 n=2^20 ->", (2**20 - 2**6) // 2**6)
