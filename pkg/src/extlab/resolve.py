"""Minimal free resolution engine.

Sweeps bidegrees with t ascending and s ascending (Bruner-style).  At each
step the kernel of the previous differential in degree t is computed, the
part already hit by positive-degree multiples of existing generators is
swept out, and new generators are adjoined mapping onto a canonical echelon
complement.  Minimality holds by construction, so the generator count in
bidegree (s, t) *is* dim Ext^{s,t}.

Charts report every (s, t) with s <= max_s, t <= max_t: a generator at
(s, t) depends only on data in internal degrees <= t.  Consumers that chase
boundary maps across the t = max_t column must subtract a one-column margin
(see lescalc / scenarios).

Resolutions serialize to a plain-text cache file (magic ``EXTLAB1``) keyed
by module content hash, bounds, and format version; orderings are canonical
so round-trips are byte-exact.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from typing import Optional

from .f2core import BitMatrix, EchelonAccumulator, Subspace, kernel_basis, rank as f2rank, rref
from .gradedmod import GradedModule
from .steenrod import AlgebraElement, AlgebraTable, Monomial

FORMAT_VERSION = 1
MAGIC = "EXTLAB1"


class CacheError(ValueError):
    """Base for resolution cache file problems."""


class CorruptFileError(CacheError):
    pass


class VersionMismatchError(CacheError):
    pass


class HashMismatchError(CacheError):
    pass


class FreeIndexer:
    """Basis bookkeeping for a free module on an ordered generator list.

    Generators are appended in non-decreasing degree order; the degree-t
    basis is (generator, admissible monomial of degree t - gen_degree) in
    generator-major order, monomials in the canonical algebra order.
    """

    __slots__ = ("algebra", "gen_degrees")

    def __init__(self, algebra: AlgebraTable):
        self.algebra = algebra
        self.gen_degrees: list[int] = []

    def add_generator(self, t: int) -> int:
        if self.gen_degrees and t < self.gen_degrees[-1]:
            raise ValueError("generators must be added in non-decreasing degree")
        self.gen_degrees.append(t)
        return len(self.gen_degrees) - 1

    def gens_in_degree(self, t: int) -> list[int]:
        return [g for g, d in enumerate(self.gen_degrees) if d == t]

    def dim(self, t: int) -> int:
        if t < 0:
            return 0
        alg = self.algebra
        return sum(alg.dim(t - d) for d in self.gen_degrees if d <= t)

    def offset(self, g: int, t: int) -> int:
        alg = self.algebra
        off = 0
        for h in range(g):
            d = self.gen_degrees[h]
            if d <= t:
                off += alg.dim(t - d)
        return off

    def blocks(self, t: int) -> list[tuple[int, int, int]]:
        """(generator, generator degree, offset) for each block in degree t."""
        alg = self.algebra
        out = []
        off = 0
        for g, d in enumerate(self.gen_degrees):
            if d > t:
                break  # degrees are non-decreasing
            out.append((g, d, off))
            off += alg.dim(t - d)
        return out

    def position(self, g: int, mono: Monomial, t: int) -> int:
        return self.offset(g, t) + self.algebra.index(mono)

    def basis(self, t: int) -> list[tuple[int, Monomial]]:
        out = []
        for g, d, _ in self.blocks(t):
            out.extend((g, m) for m in self.algebra.basis(t - d))
        return out

    def apply_sq(self, k: int, t: int, vec: int) -> int:
        """Sq^k acting on a degree-t vector of the free module."""
        if k == 0 or vec == 0:
            return vec
        alg = self.algebra
        out = 0
        out_blocks = {g: off for g, _, off in self.blocks(t + k)}
        for g, d, off in self.blocks(t):
            size = alg.dim(t - d)
            block = (vec >> off) & ((1 << size) - 1)
            if not block:
                continue
            out_off = out_blocks[g]
            acc = 0
            while block:
                low = block & -block
                acc ^= alg.multiply_mono(k, 0, t - d, low.bit_length() - 1)
                block ^= low
            out |= acc << out_off
        return out

    def element_of(self, vec: int, t: int) -> dict[int, AlgebraElement]:
        """Split a degree-t vector into generator components."""
        alg = self.algebra
        out = {}
        for g, d, off in self.blocks(t):
            size = alg.dim(t - d)
            block = (vec >> off) & ((1 << size) - 1)
            if block:
                out[g] = AlgebraElement(t - d, block)
        return out

    def vector_of(self, parts: dict[int, AlgebraElement], t: int) -> int:
        vec = 0
        for g, elem in parts.items():
            d = self.gen_degrees[g]
            if elem.degree != t - d:
                raise ValueError("component degree mismatch")
            vec |= elem.coords << self.offset(g, t)
        return vec


@dataclass(frozen=True)
class ExtChart:
    """Generator counts of a minimal resolution: dims[s][t] = dim Ext^{s,t}."""

    max_s: int
    max_t: int
    dims: tuple[tuple[int, ...], ...]

    def dim(self, s: int, t: int) -> int:
        if 0 <= s <= self.max_s and 0 <= t <= self.max_t:
            return self.dims[s][t]
        return 0

    def boundary_safe_max_t(self) -> int:
        """Entries are trusted at every (s, t) of the table, but consumers
        chasing boundary maps across the top column must drop one degree."""
        return self.max_t - 1

    def total(self) -> int:
        return sum(sum(row) for row in self.dims)

    def nonzero(self) -> list[tuple[int, int, int]]:
        return [
            (s, t, d)
            for s, row in enumerate(self.dims)
            for t, d in enumerate(row)
            if d
        ]

    def shift_t(self, a: int) -> "ExtChart":
        """Chart of the suspension: entry (s, t) becomes (s, t + a)."""
        new_max = self.max_t + a
        dims = tuple(
            tuple(self.dim(s, t - a) for t in range(new_max + 1))
            for s in range(self.max_s + 1)
        )
        return ExtChart(self.max_s, new_max, dims)


class Resolution:
    """A minimal free resolution of a module up to (max_s, max_t).

    ``gen_degrees[s]`` lists generator degrees of P_s in insertion order.
    For s >= 1, ``diffs[s][i]`` maps target generator index to its algebra
    coefficient in d(g_{s,i}); ``aug_vectors[i]`` is the augmentation image
    of g_{0,i} in module coordinates.

    Completed resolutions are never mutated; the per-degree column cache
    fills lazily with deterministic values, so concurrent readers can at
    worst recompute an entry, never observe a wrong one.
    """

    def __init__(self, module: GradedModule, max_s: int, max_t: int):
        if max_t < 0:
            raise ValueError("max_t must be non-negative")
        if max_s < 0:
            raise ValueError("max_s must be non-negative")
        if module.max_t < max_t:
            raise ValueError("module window too small for requested max_t")
        self.module = module
        self.module_hash = module.digest()
        self.max_s = max_s
        self.max_t = max_t
        self.algebra = module.algebra
        self.indexers = [FreeIndexer(module.algebra) for _ in range(max_s + 1)]
        self.diffs: list[list[dict[int, AlgebraElement]]] = [[] for _ in range(max_s + 1)]
        self.aug_vectors: list[int] = []
        self._cols: dict[tuple[int, int], list[int]] = {}

    # -- structure queries ---------------------------------------------------

    def gen_degrees(self, s: int) -> list[int]:
        return self.indexers[s].gen_degrees

    def gen_count(self, s: int, t: int) -> int:
        if not 0 <= s <= self.max_s:
            return 0
        return sum(1 for d in self.indexers[s].gen_degrees if d == t)

    def gens_at(self, s: int, t: int) -> list[int]:
        return self.indexers[s].gens_in_degree(t)

    def ambient_dim(self, s: int, t: int) -> int:
        """Dimension of the target of d_s in degree t (module coords for s=0)."""
        return self.module.dim(t) if s == 0 else self.indexers[s - 1].dim(t)

    def diff_columns(self, s: int, t: int) -> list[int]:
        """Columns of d_s at degree t over the (generator, monomial) basis."""
        key = (s, t)
        cols = self._cols.get(key)
        if cols is not None:
            return cols
        cols = []
        indexer = self.indexers[s]
        alg = self.algebra
        for g, d, _ in indexer.blocks(t):
            if d == t:
                cols.append(self._gen_target_vector(s, g))
                continue
            for mono in alg.basis(t - d):
                k = mono[0]
                sub = self.diff_columns(s, t - k)
                pos = indexer.position(g, mono[1:], t - k)
                cols.append(self._apply_ambient_sq(s, k, t - k, sub[pos]))
        self._cols[key] = cols
        return cols

    def diff_matrix(self, s: int, t: int) -> BitMatrix:
        return BitMatrix.from_columns(self.diff_columns(s, t), self.ambient_dim(s, t))

    def gen_target(self, s: int, g: int) -> int:
        """d(g) as a vector over the previous level (module coords for s=0)."""
        return self._gen_target_vector(s, g)

    def _gen_target_vector(self, s: int, g: int) -> int:
        t = self.indexers[s].gen_degrees[g]
        if s == 0:
            return self.aug_vectors[g]
        return self.indexers[s - 1].vector_of(self.diffs[s][g], t)

    def _apply_ambient_sq(self, s: int, k: int, t: int, vec: int) -> int:
        if s == 0:
            return self.module.action(k, t).mul_vec(vec)
        return self.indexers[s - 1].apply_sq(k, t, vec)

    # -- verification ----------------------------------------------------------

    def verify_d_squared(self) -> None:
        """d o d = 0 on every generator (cheap; also run outside tests)."""
        for s in range(1, self.max_s + 1):
            for g, t in enumerate(self.indexers[s].gen_degrees):
                v = self._gen_target_vector(s, g)
                prev = self.diff_matrix(s - 1, t)
                if prev.mul_vec(v) != 0:
                    raise AssertionError(f"d o d != 0 on generator {g} at (s={s}, t={t})")

    def verify_minimal(self) -> None:
        """No differential hits a generator with a unit coefficient."""
        for s in range(1, self.max_s + 1):
            for g, parts in enumerate(self.diffs[s]):
                for j, elem in parts.items():
                    if elem.degree == 0 and not elem.is_zero():
                        raise AssertionError(
                            f"unit coefficient on generator {j} in d(g_{s},{g})"
                        )

    def verify_exactness(self) -> None:
        """dim ker(d_s)_t = rank(d_{s+1})_t inside the validated window."""
        for s in range(0, self.max_s):
            for t in range(0, self.max_t + 1):
                mat = self.diff_matrix(s, t)
                ker_dim = mat.cols - rref(mat).rank
                im_dim = f2rank(self.diff_matrix(s + 1, t))
                if ker_dim != im_dim:
                    raise AssertionError(
                        f"exactness fails at (s={s}, t={t}): ker {ker_dim} != im {im_dim}"
                    )

    def chart(self) -> ExtChart:
        dims = tuple(
            tuple(self.gen_count(s, t) for t in range(self.max_t + 1))
            for s in range(self.max_s + 1)
        )
        return ExtChart(self.max_s, self.max_t, dims)


def minimal_resolution(module: GradedModule, max_s: int, max_t: int) -> Resolution:
    """Resolve ``module`` minimally up to homological degree max_s, internal
    degree max_t."""
    res = Resolution(module, max_s, max_t)
    for t in range(max_t + 1):
        kernel: Optional[Subspace] = None  # of d_{s-1} at degree t
        for s in range(max_s + 1):
            ambient = res.ambient_dim(s, t)
            cols = res.diff_columns(s, t)  # columns over old generators only
            acc = EchelonAccumulator(ambient)
            for c in cols:
                acc.add(c)
            if s == 0:
                candidates = [1 << j for j in range(module.dim(t))]
            else:
                candidates = list(kernel.basis.data) if kernel is not None else []
            new_cols = list(cols)
            for v in candidates:
                r = acc.add(v)
                if r == 0:
                    continue
                g = res.indexers[s].add_generator(t)
                if s == 0:
                    res.aug_vectors.append(r)
                    res.diffs[0].append({})
                else:
                    res.diffs[s].append(res.indexers[s - 1].element_of(r, t))
                new_cols.append(r)
            res._cols[(s, t)] = new_cols
            if s < max_s:
                kernel = kernel_basis(BitMatrix.from_columns(new_cols, ambient))
    res.verify_d_squared()
    return res


def ext_chart(res: Resolution) -> ExtChart:
    return res.chart()


# -- persistence ----------------------------------------------------------------


def _chart_lines(res: Resolution) -> list[str]:
    lines = []
    for s in range(res.max_s + 1):
        for t in range(res.max_t + 1):
            n = res.gen_count(s, t)
            if n:
                lines.append(f"gens {s} {t} {n}")
    return lines


def serialize_resolution(res: Resolution) -> str:
    out = [MAGIC]
    out.append(f"version {FORMAT_VERSION}")
    out.append(f"module {res.module_hash}")
    out.append(f"max_s {res.max_s}")
    out.append(f"max_t {res.max_t}")
    out.extend(_chart_lines(res))
    out.append("end_header")
    for s in range(res.max_s + 1):
        for g, t in enumerate(res.indexers[s].gen_degrees):
            out.append(f"gen {s} {g} {t}")
            if s == 0:
                out.append(f"aug {res.aug_vectors[g]:x}")
            else:
                for j in sorted(res.diffs[s][g]):
                    elem = res.diffs[s][g][j]
                    out.append(f"d {j} {elem.degree} {elem.coords:x}")
    out.append("end")
    return "\n".join(out) + "\n"


def save_resolution(res: Resolution, path: str) -> None:
    """Write atomically (temp file + rename); output is byte-deterministic."""
    dirname = os.path.dirname(os.path.abspath(path))
    os.makedirs(dirname, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=dirname, prefix=".extlab-tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(serialize_resolution(res))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_resolution(path: str, module: GradedModule) -> Resolution:
    """Load and validate a cached resolution of ``module``.

    Checks magic bytes, format version, the module content hash, and the
    d o d = 0 invariant before returning.
    """
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as exc:
        raise CorruptFileError(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or lines[0] != MAGIC:
        raise CorruptFileError("missing EXTLAB1 magic")
    if not text.endswith("end\n"):
        raise CorruptFileError("truncated file: missing end marker")
    try:
        header: dict[str, str] = {}
        idx = 1
        gens_counts: dict[tuple[int, int], int] = {}
        while lines[idx] != "end_header":
            keyword, _, rest = lines[idx].partition(" ")
            if keyword == "gens":
                s, t, n = (int(x) for x in rest.split())
                gens_counts[(s, t)] = n
            else:
                header[keyword] = rest
            idx += 1
        version = int(header["version"])
        if version != FORMAT_VERSION:
            raise VersionMismatchError(
                f"cache format {version}, expected {FORMAT_VERSION}"
            )
        if header["module"] != module.digest():
            raise HashMismatchError(
                "cache was built from a different module "
                f"({header['module'][:12]}.. != {module.digest()[:12]}..)"
            )
        max_s = int(header["max_s"])
        max_t = int(header["max_t"])
        res = Resolution(module, max_s, max_t)
        idx += 1
        cur: Optional[tuple[int, int]] = None
        for line in lines[idx:]:
            if line == "end":
                break
            parts = line.split()
            if parts[0] == "gen":
                s, g, t = int(parts[1]), int(parts[2]), int(parts[3])
                if res.indexers[s].add_generator(t) != g:
                    raise CorruptFileError("generator indices out of order")
                res.diffs[s].append({})
                if s == 0:
                    res.aug_vectors.append(0)
                cur = (s, g)
            elif parts[0] == "aug":
                s, g = cur
                res.aug_vectors[g] = int(parts[1], 16)
            elif parts[0] == "d":
                s, g = cur
                j, deg, coords = int(parts[1]), int(parts[2]), int(parts[3], 16)
                res.diffs[s][g][j] = AlgebraElement(deg, coords)
            else:
                raise CorruptFileError(f"unexpected line {line!r}")
    except CacheError:
        raise
    except (KeyError, ValueError, IndexError, TypeError) as exc:
        raise CorruptFileError(f"malformed cache file: {exc}") from exc
    for (s, t), n in gens_counts.items():
        if res.gen_count(s, t) != n:
            raise CorruptFileError("generator table does not match body")
    res.verify_d_squared()
    return res


def cache_path(cache_dir: str, module: GradedModule, max_s: int, max_t: int) -> str:
    name = f"{module.digest()[:24]}_s{max_s}_t{max_t}_v{FORMAT_VERSION}.extres"
    return os.path.join(cache_dir, name)


def cached_resolution(
    module: GradedModule,
    max_s: int,
    max_t: int,
    cache_dir: Optional[str] = None,
) -> Resolution:
    """Resolve through the cache: load on hit, compute and store on miss."""
    if cache_dir is None:
        return minimal_resolution(module, max_s, max_t)
    path = cache_path(cache_dir, module, max_s, max_t)
    if os.path.exists(path):
        try:
            return load_resolution(path, module)
        except CacheError:
            pass  # fall through and recompute
    res = minimal_resolution(module, max_s, max_t)
    save_resolution(res, path)
    return res
