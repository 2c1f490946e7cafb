"""Indexed binary max-heap keyed by arm index.

Ties on the key go to the lower index, so ``top()`` agrees with a
first-maximum scan such as ``numpy.argmax``.
"""

from __future__ import annotations

import math


class IndexedMaxHeap:
    __slots__ = ("_key", "_pos", "_heap")

    def __init__(self, size: int):
        self._key = [-math.inf] * size
        self._pos = [-1] * size
        self._heap: list[int] = []

    def __len__(self) -> int:
        return len(self._heap)

    def __contains__(self, item: int) -> bool:
        return self._pos[item] >= 0

    def key(self, item: int) -> float:
        return self._key[item]

    def top(self) -> int:
        if not self._heap:
            raise IndexError("top of an empty heap")
        return self._heap[0]

    def top_key(self) -> float:
        return self._key[self.top()]

    def second_key(self) -> float:
        """Largest key among all items except the top one."""
        heap, key = self._heap, self._key
        if len(heap) < 2:
            raise IndexError("second_key needs at least two items")
        if len(heap) == 2:
            return key[heap[1]]
        return max(key[heap[1]], key[heap[2]])

    def set(self, item: int, value: float) -> None:
        """Insert ``item`` or change its key."""
        key, pos = self._key, self._pos
        old = key[item]
        key[item] = value
        i = pos[item]
        if i < 0:
            self._heap.append(item)
            pos[item] = len(self._heap) - 1
            self._sift_up(pos[item])
        elif value > old:
            self._sift_up(i)
        elif value < old:
            self._sift_down(i)

    def remove(self, item: int) -> None:
        heap, pos = self._heap, self._pos
        i = pos[item]
        if i < 0:
            raise KeyError(item)
        last = heap.pop()
        pos[item] = -1
        self._key[item] = -math.inf
        if last != item:
            heap[i] = last
            pos[last] = i
            self._sift_up(i)
            self._sift_down(pos[last])

    def _sift_up(self, i: int) -> None:
        heap, key, pos = self._heap, self._key, self._pos
        item = heap[i]
        k = key[item]
        while i > 0:
            parent = (i - 1) >> 1
            p = heap[parent]
            pk = key[p]
            if k > pk or (k == pk and item < p):
                heap[i] = p
                pos[p] = i
                i = parent
            else:
                break
        heap[i] = item
        pos[item] = i

    def _sift_down(self, i: int) -> None:
        heap, key, pos = self._heap, self._key, self._pos
        size = len(heap)
        item = heap[i]
        k = key[item]
        while True:
            child = 2 * i + 1
            if child >= size:
                break
            c = heap[child]
            ck = key[c]
            right = child + 1
            if right < size:
                r = heap[right]
                rk = key[r]
                if rk > ck or (rk == ck and r < c):
                    child, c, ck = right, r, rk
            if ck > k or (ck == k and c < item):
                heap[i] = c
                pos[c] = i
                i = child
            else:
                break
        heap[i] = item
        pos[item] = i
