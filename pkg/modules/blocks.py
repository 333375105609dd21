"""
Homogeneous blocks and the COMBINE primitive
Equal-size COMBINE (phase pairing) and general COMBINE (cancels unequal blocks)
"""
from typing import List, Optional, Sequence

from .oracle import CountingOracle


class BlockInvariantError(AssertionError):
    """A BlockList invariant or a COMBINE precondition was violated."""


class Block:
    """Set of input positions known to hold one (unknown) value.

    `rep` is always the smallest index; in compact mode `members` is None and
    only the size is tracked.
    """

    __slots__ = ('rep', 'size', 'members')

    def __init__(self, rep: int, size: int, members: Optional[List[int]] = None):
        self.rep = rep
        self.size = size
        self.members = members

    @classmethod
    def from_indices(cls, indices: Sequence[int]):
        members = sorted(indices)
        if not members:
            raise BlockInvariantError("blocks are nonempty")
        return cls(members[0], len(members), members)

    @property
    def indices(self):
        return tuple(self.members) if self.members is not None else None

    def union(self, other):
        if self.members is None:
            return Block(min(self.rep, other.rep), self.size + other.size)
        # sorted() merges the two runs in linear time
        members = sorted(self.members + other.members)
        return Block(members[0], len(members), members)

    def trimmed(self, count: int):
        """Drop the `count` largest indices."""
        if self.members is None:
            return Block(self.rep, self.size - count)
        members = self.members[:-count]
        return Block(members[0], len(members), members)

    def __repr__(self):
        if self.members is None:
            return f"Block(rep={self.rep}, size={self.size})"
        return f"Block({self.members})"


def two_adic_valuation(value: int) -> int:
    return (value & -value).bit_length() - 1


def is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


class BlockList:
    """Ordered list S_1..S_l of disjoint homogeneous blocks, sizes nonincreasing.

    Positions are 1-based. Storage is a gap buffer: `_left` holds positions
    1..p in order and `_right` holds p+1..l reversed, so work near the cursor
    is O(1).
    """

    MODES = ('basic', 'oblivious', 'greedy')

    def __init__(self, blocks: Sequence[Block] = (), mode='basic', debug_checks=False):
        if mode not in self.MODES:
            raise ValueError(f"unknown block mode {mode!r}")
        self.mode = mode
        self.debug_checks = debug_checks
        self._left: List[Block] = []
        self._right: List[Block] = list(reversed(blocks))
        self.total = sum(b.size for b in blocks)
        self.cancellations = 0
        self.partial_cancellations = 0
        self.merges = 0
        # current oblivious phase k; None outside a phase run
        self.phase = None
        if debug_checks:
            self.validate()

    @classmethod
    def singletons(cls, n: int, compact=False, mode='basic', debug_checks=False):
        if compact:
            blocks = [Block(i, 1) for i in range(n)]
        else:
            blocks = [Block(i, 1, [i]) for i in range(n)]
        return cls(blocks, mode=mode, debug_checks=debug_checks)

    @classmethod
    def from_index_sets(cls, sets, mode='basic', debug_checks=True):
        return cls([Block.from_indices(s) for s in sets], mode=mode, debug_checks=debug_checks)

    # -- access ------------------------------------------------------------

    def __len__(self):
        return len(self._left) + len(self._right)

    def _block_at(self, pos: int) -> Block:
        left = self._left
        if pos <= len(left):
            return left[pos - 1]
        right = self._right
        return right[len(right) - (pos - len(left))]

    def block(self, pos: int) -> Block:
        if not 1 <= pos <= len(self):
            raise IndexError(f"block position {pos} out of range 1..{len(self)}")
        return self._block_at(pos)

    def size(self, pos: int) -> int:
        return self.block(pos).size

    def blocks(self) -> List[Block]:
        return self._left + self._right[::-1]

    def sizes(self) -> List[int]:
        return [b.size for b in self.blocks()]

    def index_sets(self):
        return [b.indices for b in self.blocks()]

    def s_exponent(self, pos: int) -> int:
        """s_1 = 2-adic valuation of |S_1|; s_j = log2 |S_j| for j >= 2."""
        size = self.size(pos)
        if pos == 1:
            return two_adic_valuation(size)
        return size.bit_length() - 1

    def s_exponents(self) -> List[int]:
        return [self.s_exponent(p) for p in range(1, len(self) + 1)]

    def prefix_size(self, pos: int) -> int:
        return sum(self._block_at(p).size for p in range(1, pos + 1))

    def _seek(self, pos: int):
        """Move the gap so that len(_left) == pos - 1."""
        left, right = self._left, self._right
        target = pos - 1
        while len(left) > target:
            right.append(left.pop())
        while len(left) < target:
            left.append(right.pop())

    # -- queries on structure ---------------------------------------------

    def dominant_block(self) -> Optional[int]:
        """1 iff |S_1| exceeds the union of all other blocks, else None."""
        if not len(self):
            return None
        first = self._block_at(1).size
        return 1 if first > self.total - first else None

    def find_equal_pair(self, size: int, start: int = 1) -> Optional[int]:
        """Smallest j >= start with |S_j| = |S_{j+1}| = size."""
        count = len(self)
        j = max(start, 1)
        while j < count:
            current = self._block_at(j).size
            if current < size:
                return None
            if current == size:
                return j if self._block_at(j + 1).size == size else None
            j += 1
        return None

    def first_equal_exponent(self):
        """(j, |S_1|+..+|S_j|) for the smallest j with s_j = s_{j+1}, or (None, None)."""
        count = len(self)
        if count < 2:
            return None, None
        first = self._block_at(1).size
        prev_s = two_adic_valuation(first)
        prefix = first
        for j in range(1, count):
            nxt = self._block_at(j + 1).size
            s = nxt.bit_length() - 1
            if s == prev_s:
                return j, prefix
            prefix += nxt
            prev_s = s
        return None, None

    # -- COMBINE -----------------------------------------------------------

    def _pair(self, pos: int):
        if not 1 <= pos < len(self):
            raise BlockInvariantError(f"COMBINE position {pos} needs 1 <= i < l={len(self)}")
        self._seek(pos)
        return self._right[-1], self._right[-2]

    def _place_merged(self, merged: Block):
        left = self._left
        if left and left[-1].size < merged.size:
            raise BlockInvariantError(
                f"merged block of size {merged.size} would follow a block of size {left[-1].size}")
        self._right.append(merged)
        self.merges += 1

    def combine_equal(self, pos: int, oracle: CountingOracle):
        """Phase COMBINE: merge S_i, S_{i+1} on equal values, drop both otherwise."""
        first, second = self._pair(pos)
        if first.size != second.size:
            raise BlockInvariantError(
                f"combine_equal on unequal sizes {first.size} and {second.size} at position {pos}")
        answer = oracle.query_xor(first.rep, second.rep)
        right = self._right
        right.pop()
        right.pop()
        if answer == 0:
            self._place_merged(first.union(second))
        else:
            self.total -= 2 * first.size
            self.cancellations += 1
        if self.debug_checks:
            self.validate()
        return self

    def combine_general(self, pos: int, oracle: CountingOracle):
        """COMBINE that also cancels |S_{i+1}| bits out of a larger S_i."""
        first, second = self._pair(pos)
        if first.size < second.size:
            raise BlockInvariantError(
                f"sizes out of order at position {pos}: {first.size} < {second.size}")
        answer = oracle.query_xor(first.rep, second.rep)
        right = self._right
        right.pop()
        right.pop()
        if answer == 0:
            self._place_merged(first.union(second))
        elif first.size > second.size:
            survivor = first.trimmed(second.size)
            if right and right[-1].size > survivor.size:
                raise BlockInvariantError(
                    f"trimmed block of size {survivor.size} precedes a block of size {right[-1].size}")
            right.append(survivor)
            self.total -= 2 * second.size
            self.partial_cancellations += 1
        else:
            self.total -= 2 * first.size
            self.cancellations += 1
        if self.debug_checks:
            self.validate()
        return self

    def greedy_reduce(self, oracle: CountingOracle):
        """Greedy COMBINE steps until S_1 dominates or the list is empty.

        Makes the same choices as repeating dominant_block / first_equal_exponent /
        combine_general, but on flat size, representative and member stacks.
        The scan resumes one position left of the previous COMBINE: no pair
        further left can have changed.
        """
        self._seek(1)
        blocks = self._right
        sizes = [b.size for b in blocks]
        reps = [b.rep for b in blocks]
        members = [b.members for b in blocks]
        # positions left of the cursor, in order
        l_sizes, l_reps, l_members = [], [], []
        left_total = 0
        total = self.total
        query = oracle.query_xor
        merges = cancellations = partial = 0
        try:
            while sizes or l_sizes:
                first = l_sizes[0] if l_sizes else sizes[-1]
                if 2 * first > total:
                    break
                while True:
                    if len(sizes) < 2:
                        raise BlockInvariantError(f"no equal exponents in non-dominated list of total {total}")
                    here = sizes[-1]
                    # lowbit(|S_1|) or |S_j| for j >= 2, against the power of two after it
                    if (here & -here if not l_sizes else here) == sizes[-2]:
                        break
                    l_sizes.append(sizes.pop())
                    l_reps.append(reps.pop())
                    l_members.append(members.pop())
                    left_total += here
                if 2 * (left_total + here) > total:
                    while l_sizes:
                        sizes.append(l_sizes.pop())
                        reps.append(l_reps.pop())
                        members.append(l_members.pop())
                    left_total = 0
                a_size, b_size = sizes[-1], sizes[-2]
                answer = query(reps[-1], reps[-2])
                a_rep = reps.pop()
                b_rep = reps.pop()
                a_mem = members.pop()
                b_mem = members.pop()
                sizes.pop()
                sizes.pop()
                if answer == 0:
                    size = a_size + b_size
                    if l_sizes and l_sizes[-1] < size:
                        raise BlockInvariantError(
                            f"merged block of size {size} would follow a block of size {l_sizes[-1]}")
                    sizes.append(size)
                    if a_mem is None:
                        reps.append(min(a_rep, b_rep))
                        members.append(None)
                    else:
                        merged = sorted(a_mem + b_mem)
                        reps.append(merged[0])
                        members.append(merged)
                    merges += 1
                elif a_size > b_size:
                    size = a_size - b_size
                    if sizes and sizes[-1] > size:
                        raise BlockInvariantError(
                            f"trimmed block of size {size} precedes a block of size {sizes[-1]}")
                    sizes.append(size)
                    reps.append(a_rep)
                    members.append(None if a_mem is None else a_mem[:-b_size])
                    total -= 2 * b_size
                    partial += 1
                else:
                    total -= 2 * a_size
                    cancellations += 1
                if l_sizes:
                    left_total -= l_sizes[-1]
                    sizes.append(l_sizes.pop())
                    reps.append(l_reps.pop())
                    members.append(l_members.pop())
        finally:
            self._left = [Block(r, s, m) for s, r, m in zip(l_sizes, l_reps, l_members)]
            self._right = [Block(r, s, m) for s, r, m in zip(sizes, reps, members)]
            self.total = total
            self.merges += merges
            self.cancellations += cancellations
            self.partial_cancellations += partial
        if self.debug_checks:
            self.validate()
        return self

    # -- invariants --------------------------------------------------------

    def validate(self, mode=None, phase=None):
        """Check every invariant of `mode` (defaults to the list's own mode).

        In oblivious mode during phase k (`phase`, else the list's own phase),
        each size 2^t with t < k-1 may appear at most once.
        """
        mode = mode or self.mode
        phase = self.phase if phase is None else phase
        blocks = self.blocks()
        seen = set()
        previous = None
        for pos, block in enumerate(blocks, start=1):
            if block.size <= 0:
                raise BlockInvariantError(f"empty block at position {pos}")
            if block.members is not None:
                if len(block.members) != block.size or block.rep != block.members[0]:
                    raise BlockInvariantError(f"inconsistent block at position {pos}: {block!r}")
                if seen.intersection(block.members):
                    raise BlockInvariantError(f"blocks overlap at position {pos}")
                seen.update(block.members)
            if previous is not None and previous.size < block.size:
                raise BlockInvariantError(f"sizes increase at position {pos}")
            if mode == 'oblivious' and not is_power_of_two(block.size):
                raise BlockInvariantError(f"non power-of-2 block at position {pos}")
            if mode == 'greedy' and pos >= 2 and not is_power_of_two(block.size):
                raise BlockInvariantError(f"non power-of-2 block at position {pos}")
            previous = block
        if sum(b.size for b in blocks) != self.total:
            raise BlockInvariantError("cached total out of sync")
        if mode == 'oblivious' and phase is not None and phase >= 2:
            limit = 1 << (phase - 1)
            small = [b.size for b in blocks if b.size < limit]
            if len(small) != len(set(small)):
                raise BlockInvariantError(f"phase {phase}: repeated block size below {limit} in {small}")
        if mode == 'greedy':
            exps = self.s_exponents()
            if any(a < b for a, b in zip(exps, exps[1:])):
                raise BlockInvariantError(f"s exponents not nonincreasing: {exps}")
        return True

    def __repr__(self):
        return f"BlockList({self.sizes()})"
