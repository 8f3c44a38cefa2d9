"""Haar transforms, patch grids and the compressed-feature CBIR pipeline.

Images are 8-bit grayscale PGM (P2/P5) only: codec-free and bit-exact.
A database member is cut into P x P patches (P a power of two), each
patch is Haar-transformed to a sparse coefficient vector, compressed by
a sensing matrix T (feature = concatenation of T @ coeffs over patches
in row-major order), and queries are ranked by zero-lag normalized
cross-correlation between whole feature vectors.
"""

import hashlib
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .construct import SensingMatrix
from .errors import (LabelError, ParseError, PatchGridError, PatchSizeError,
                     ShapeError)

SQRT2 = math.sqrt(2.0)


def _check_patch_size(P: int, levels):
    if P < 1 or P & (P - 1) != 0:
        raise PatchSizeError(f"patch edge {P} is not a power of two")
    depth = P.bit_length() - 1
    if levels is None:
        return depth
    if not 0 <= levels <= depth:
        raise PatchSizeError(f"levels={levels} exceeds log2({P})={depth}")
    return levels


def haar_forward(patch: np.ndarray, levels: int = None) -> np.ndarray:
    """Orthonormal 2-D Haar transform; returns the flattened P*P vector."""
    a = np.asarray(patch, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise PatchSizeError(f"patch must be square, got {a.shape}")
    P = a.shape[0]
    levels = _check_patch_size(P, levels)
    out = a.copy()
    s = P
    for _ in range(levels):
        blk = out[:s, :s]
        for axis in (1, 0):
            b = np.moveaxis(blk, axis, -1)
            lo = (b[..., 0::2] + b[..., 1::2]) / SQRT2
            hi = (b[..., 0::2] - b[..., 1::2]) / SQRT2
            blk = np.moveaxis(np.concatenate([lo, hi], axis=-1), -1, axis)
        out[:s, :s] = blk
        s //= 2
    return out.ravel()


def haar_inverse(coeffs: np.ndarray, levels: int = None) -> np.ndarray:
    """Inverse of haar_forward; returns the P x P patch."""
    v = np.asarray(coeffs, dtype=np.float64).ravel()
    P = int(round(math.sqrt(v.size)))
    if P * P != v.size:
        raise PatchSizeError(f"coefficient length {v.size} is not a square")
    levels = _check_patch_size(P, levels)
    out = v.reshape(P, P).copy()
    sizes = [P >> t for t in range(levels)]
    for s in reversed(sizes):
        blk = out[:s, :s]
        for axis in (0, 1):
            b = np.moveaxis(blk, axis, -1)
            half = s // 2
            lo, hi = b[..., :half], b[..., half:]
            merged = np.empty_like(b)
            merged[..., 0::2] = (lo + hi) / SQRT2
            merged[..., 1::2] = (lo - hi) / SQRT2
            blk = np.moveaxis(merged, -1, axis)
        out[:s, :s] = blk
    return out


@dataclass(frozen=True)
class PatchGrid:
    height: int
    width: int
    patch: int

    @property
    def num_patches(self) -> int:
        return (self.height // self.patch) * (self.width // self.patch)


def patchify(image: np.ndarray, P: int):
    """Split into P x P patches, row-major; returns (PatchGrid, (M',P,P) array)."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise PatchGridError(f"expected a 2-D image, got shape {img.shape}")
    H, W = img.shape
    if H % P or W % P:
        raise PatchGridError(f"image {H}x{W} not divisible by patch edge {P}")
    grid = PatchGrid(height=H, width=W, patch=P)
    patches = (img.reshape(H // P, P, W // P, P)
                  .transpose(0, 2, 1, 3)
                  .reshape(grid.num_patches, P, P))
    return grid, patches


def unpatchify(grid: PatchGrid, patches: np.ndarray) -> np.ndarray:
    P = grid.patch
    gh, gw = grid.height // P, grid.width // P
    arr = np.asarray(patches, dtype=np.float64).reshape(gh, gw, P, P)
    return arr.transpose(0, 2, 1, 3).reshape(grid.height, grid.width)


def extract_features(image: np.ndarray, T: SensingMatrix, P: int,
                     levels: int = None) -> np.ndarray:
    """Concatenated compressed Haar coefficients, patch by patch."""
    if T.M != P * P:
        raise ShapeError(f"matrix has {T.M} columns, patch needs {P * P}")
    grid, patches = patchify(image, P)
    A = T.to_dense().astype(np.float64)
    coeffs = np.stack([haar_forward(p, levels) for p in patches])   # (M', P*P)
    return (coeffs @ A.T).ravel()


@dataclass(eq=False)
class FeatureDB:
    ids: list
    labels: list
    paths: list
    features: np.ndarray        # (N, L) float64
    patch: int
    levels: int
    matrix_provenance: str = ""
    provenance_hash: str = ""

    def __post_init__(self):
        if not self.provenance_hash:
            self.provenance_hash = hashlib.sha256(
                self.matrix_provenance.encode()).hexdigest()[:16]

    def label_of(self, ident: str) -> str:
        try:
            return self.labels[self.ids.index(ident)]
        except ValueError:
            raise LabelError(f"unknown identifier {ident!r}")


_FDB_MAGIC = b"ESFDB1\n"


def save_feature_db(db: FeatureDB, directory: str) -> None:
    """Persist as manifest.tsv + features.bin (header + raw float64 rows)."""
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "manifest.tsv"), "w") as f:
        for ident, label, path in zip(db.ids, db.labels, db.paths):
            f.write(f"{ident}\t{label}\t{path}\n")
    n, L = db.features.shape
    with open(os.path.join(directory, "features.bin"), "wb") as f:
        f.write(_FDB_MAGIC)
        header = (f"count={n} len={L} patch={db.patch} levels={db.levels} "
                  f"hash={db.provenance_hash}\n")
        f.write(header.encode())
        f.write(db.matrix_provenance.encode() + b"\n")
        f.write(np.ascontiguousarray(db.features, dtype=np.float64).tobytes())


def load_feature_db(directory: str) -> FeatureDB:
    ids, labels, paths = [], [], []
    with open(os.path.join(directory, "manifest.tsv")) as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise ParseError("manifest line needs id<TAB>class<TAB>path",
                                 line=lineno)
            ids.append(parts[0]); labels.append(parts[1]); paths.append(parts[2])
    with open(os.path.join(directory, "features.bin"), "rb") as f:
        if f.read(len(_FDB_MAGIC)) != _FDB_MAGIC:
            raise ParseError("bad feature file magic", line=1)
        fields = dict(tok.split("=") for tok in f.readline().decode().split())
        n, L = int(fields["count"]), int(fields["len"])
        provenance = f.readline().decode().rstrip("\n")
        data = np.frombuffer(f.read(n * L * 8), dtype=np.float64).reshape(n, L)
    if n != len(ids):
        raise ParseError(f"manifest lists {len(ids)} entries, blob has {n}")
    return FeatureDB(ids=ids, labels=labels, paths=paths, features=data.copy(),
                     patch=int(fields["patch"]), levels=int(fields["levels"]),
                     matrix_provenance=provenance,
                     provenance_hash=fields["hash"])


def _norm_corr(a: np.ndarray, b: np.ndarray) -> float:
    """Zero-lag normalized cross-correlation (Pearson); 0 if degenerate."""
    da = a - a.mean()
    db = b - b.mean()
    na, nb = np.linalg.norm(da), np.linalg.norm(db)
    if na == 0 or nb == 0:
        return 0.0
    return float(da @ db / (na * nb))


def retrieve(query_feature: np.ndarray, db: FeatureDB, topn: int = 10):
    """Ranked [(id, label, similarity)], descending; ties stable by id."""
    q = np.asarray(query_feature, dtype=np.float64).ravel()
    if q.size != db.features.shape[1]:
        raise ShapeError(f"feature length {q.size} != database {db.features.shape[1]}")
    sims = [_norm_corr(q, db.features[i]) for i in range(len(db.ids))]
    order = sorted(range(len(db.ids)), key=lambda i: (-sims[i], db.ids[i]))
    return [(db.ids[i], db.labels[i], sims[i]) for i in order[:topn]]


@dataclass(eq=False)
class RetrievalMetrics:
    per_query: list             # (query_id, Nc, Nf, Nm, precision, recall)
    precision: float            # mean over queries
    recall: float
    confusion: dict = field(default_factory=dict)   # (qclass, rclass) -> count
    classes: list = field(default_factory=list)

    def confusion_matrix(self) -> np.ndarray:
        idx = {c: i for i, c in enumerate(self.classes)}
        mat = np.zeros((len(self.classes), len(self.classes)), dtype=np.int64)
        for (qc, rc), cnt in self.confusion.items():
            mat[idx[qc], idx[rc]] = cnt
        return mat


def score_retrieval(rankings: list, query_labels: list, db_labels: dict,
                    topn: int = 10) -> RetrievalMetrics:
    """Precision/recall/confusion for a batch of queries.

    rankings: per query, the ranked retrieved ids (top-N).
    query_labels: (query_id, class) per query.
    db_labels: id -> class for every retrievable item; N_m for a query
    is the size of its class within the database.
    """
    class_sizes = {}
    for label in db_labels.values():
        class_sizes[label] = class_sizes.get(label, 0) + 1
    classes = sorted(set(class_sizes) | {c for _, c in query_labels})
    confusion = {}
    per_query = []
    for (qid, qclass), retrieved in zip(query_labels, rankings):
        nc = nf = 0
        for rid in retrieved[:topn]:
            if rid not in db_labels:
                raise LabelError(f"retrieved id {rid!r} has no label")
            rclass = db_labels[rid]
            confusion[(qclass, rclass)] = confusion.get((qclass, rclass), 0) + 1
            if rclass == qclass:
                nc += 1
            else:
                nf += 1
        nm = class_sizes.get(qclass, 0)
        precision = nc / (nc + nf) if nc + nf else 0.0
        recall = nc / nm if nm else 0.0
        per_query.append((qid, nc, nf, nm, precision, recall))
    mean_p = sum(q[4] for q in per_query) / len(per_query) if per_query else 0.0
    mean_r = sum(q[5] for q in per_query) / len(per_query) if per_query else 0.0
    return RetrievalMetrics(per_query=per_query, precision=mean_p, recall=mean_r,
                            confusion=confusion, classes=classes)


# ---------------------------------------------------------------------------
# PGM I/O (P2 ascii / P5 binary, 8-bit)

def read_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as f:
        data = f.read()
    tokens = []
    i = 0
    while len(tokens) < 4 and i < len(data):
        if data[i:i + 1] == b"#":
            while i < len(data) and data[i] not in b"\n":
                i += 1
        elif data[i] in b" \t\r\n":
            i += 1
        else:
            j = i
            while j < len(data) and data[j] not in b" \t\r\n#":
                j += 1
            tokens.append(data[i:j])
            i = j
    if len(tokens) < 4 or tokens[0] not in (b"P2", b"P5"):
        raise ParseError("not an 8-bit PGM (P2/P5) file", line=1)
    magic = tokens[0]
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval > 255:
        raise ParseError("only 8-bit PGM supported", line=1)
    if magic == b"P5":
        raster = data[i + 1: i + 1 + w * h]
        img = np.frombuffer(raster, dtype=np.uint8, count=w * h)
    else:
        img = np.array([int(t) for t in data[i:].split()[: w * h]], dtype=np.uint8)
    return img.reshape(h, w).astype(np.float64)


def write_pgm(image: np.ndarray, path: str) -> None:
    img = np.clip(np.round(np.asarray(image)), 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode())
        f.write(img.tobytes())
