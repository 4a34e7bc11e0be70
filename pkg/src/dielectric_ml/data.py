"""Dataset schema, CSV ingestion, standardization, splitting, and synthesis.

The canonical interchange format is a UTF-8 CSV with the exact header

    frequency_hz,conductivity_s_per_m,relative_permittivity,reported_tau_s,label,source_id

where ``reported_tau_s`` may be empty and ``label`` is one of I, II, III.
The synthetic generator produces class-conditioned records by forward
evaluation of the Cole-Cole model, calibrated so class medians of relative
permittivity sit near 7.2 / 18.3 / 59.15 for normal / benign / malignant.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import physics
from .errors import InvalidParameterError, SchemaError, ZeroVarianceError

log = logging.getLogger(__name__)

CSV_HEADER = [
    "frequency_hz",
    "conductivity_s_per_m",
    "relative_permittivity",
    "reported_tau_s",
    "label",
    "source_id",
]

# Corpus frequency envelope (Hz): 150 kHz to 20 GHz.
FREQUENCY_ENVELOPE_HZ = (1.5e5, 2.0e10)


class CellClass(IntEnum):
    """Cell pathology class with fixed ordinal codes for reporting."""

    NORMAL = 1
    BENIGN = 2
    MALIGNANT = 3


LABEL_TO_CLASS = {"I": CellClass.NORMAL, "II": CellClass.BENIGN, "III": CellClass.MALIGNANT}
CLASS_TO_LABEL = {v: k for k, v in LABEL_TO_CLASS.items()}


def _check_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SpectralRecord:
    """One measured dielectric spectroscopy row."""

    frequency: float
    conductivity: float
    rel_permittivity: float
    reported_tau: Optional[float]
    label: CellClass
    source_id: str

    def __post_init__(self):
        _check_finite("frequency", self.frequency)
        _check_finite("conductivity", self.conductivity)
        _check_finite("rel_permittivity", self.rel_permittivity)
        if self.frequency <= 0:
            raise InvalidParameterError(f"frequency must be > 0, got {self.frequency}")
        if self.conductivity < 0:
            raise InvalidParameterError(f"conductivity must be >= 0, got {self.conductivity}")
        if self.rel_permittivity <= 0:
            raise InvalidParameterError(
                f"relative permittivity must be > 0, got {self.rel_permittivity}"
            )
        if self.reported_tau is not None:
            _check_finite("reported_tau", self.reported_tau)
            if self.reported_tau <= 0:
                raise InvalidParameterError(f"reported_tau must be > 0, got {self.reported_tau}")


@dataclass(frozen=True)
class Provenance:
    """Where a dataset came from: file hash for ingested CSVs, row count always."""

    row_count: int
    file_hash: Optional[str] = None
    source: str = "memory"


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of spectral records."""

    records: tuple[SpectralRecord, ...]
    provenance: Provenance

    def __len__(self) -> int:
        return len(self.records)

    def class_counts(self) -> dict[CellClass, int]:
        counts = {c: 0 for c in CellClass}
        for r in self.records:
            counts[r.label] += 1
        return counts

    def labels(self) -> np.ndarray:
        return np.array([int(r.label) for r in self.records], dtype=np.int64)


def dataset_from_records(records: Sequence[SpectralRecord], source: str = "memory") -> Dataset:
    return Dataset(records=tuple(records), provenance=Provenance(row_count=len(records), source=source))


# --------------------------------------------------------------------------- #
# CSV ingestion / serialization
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class RowError:
    """Structured row-level ingestion failure. ``line`` is 1-based (header = 1)."""

    line: int
    column: Optional[str]
    message: str


@dataclass(frozen=True)
class IngestResult:
    dataset: Dataset
    errors: tuple[RowError, ...]
    warnings: tuple[str, ...]


def ingest_csv(path: str | Path, *, reject_out_of_envelope: bool = False) -> IngestResult:
    """Parse a schema-conformant CSV into a Dataset.

    Every row becomes a SpectralRecord or a RowError (row order preserved,
    valid rows kept). A malformed header raises SchemaError. Frequencies
    outside the corpus envelope produce a warning, or a RowError when
    ``reject_out_of_envelope`` is set.
    """
    path = Path(path)
    raw = path.read_bytes()
    file_hash = hashlib.sha256(raw).hexdigest()

    records: list[SpectralRecord] = []
    errors: list[RowError] = []
    warnings: list[str] = []

    reader = csv.reader(raw.decode("utf-8").splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{path}: empty file, expected header {','.join(CSV_HEADER)}")
    if header != CSV_HEADER:
        raise SchemaError(
            f"{path}: malformed header {','.join(header)!r}, expected {','.join(CSV_HEADER)!r}"
        )

    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            errors.append(RowError(line_no, None, f"expected {len(CSV_HEADER)} cells, got {len(row)}"))
            continue
        cells = dict(zip(CSV_HEADER, row))
        try:
            numeric = {}
            for col in ("frequency_hz", "conductivity_s_per_m", "relative_permittivity"):
                try:
                    numeric[col] = float(cells[col])
                except ValueError:
                    raise _CellError(col, f"unparseable numeric cell {cells[col]!r}")
            tau_text = cells["reported_tau_s"].strip()
            if tau_text:
                try:
                    reported_tau = float(tau_text)
                except ValueError:
                    raise _CellError("reported_tau_s", f"unparseable numeric cell {tau_text!r}")
            else:
                reported_tau = None
            label_text = cells["label"].strip()
            if label_text not in LABEL_TO_CLASS:
                raise _CellError("label", f"unknown label {label_text!r}, expected one of I, II, III")

            record = SpectralRecord(
                frequency=numeric["frequency_hz"],
                conductivity=numeric["conductivity_s_per_m"],
                rel_permittivity=numeric["relative_permittivity"],
                reported_tau=reported_tau,
                label=LABEL_TO_CLASS[label_text],
                source_id=cells["source_id"],
            )
        except _CellError as exc:
            errors.append(RowError(line_no, exc.column, exc.message))
            continue
        except InvalidParameterError as exc:
            errors.append(RowError(line_no, None, str(exc)))
            continue

        lo, hi = FREQUENCY_ENVELOPE_HZ
        if not lo <= record.frequency <= hi:
            message = (
                f"line {line_no}: frequency {record.frequency!r} Hz outside corpus envelope "
                f"[{lo:g}, {hi:g}]"
            )
            if reject_out_of_envelope:
                errors.append(RowError(line_no, "frequency_hz", message))
                continue
            warnings.append(message)
            log.warning("%s: %s", path, message)

        records.append(record)

    dataset = Dataset(
        records=tuple(records),
        provenance=Provenance(row_count=len(records), file_hash=file_hash, source=str(path)),
    )
    return IngestResult(dataset=dataset, errors=tuple(errors), warnings=tuple(warnings))


class _CellError(Exception):
    def __init__(self, column: str, message: str):
        self.column = column
        self.message = message
        super().__init__(message)


def write_csv(dataset: Dataset, path: str | Path) -> None:
    """Serialize a dataset losslessly (floats via repr round-trip)."""
    path = Path(path)
    lines = [",".join(CSV_HEADER)]
    for r in dataset.records:
        tau = repr(r.reported_tau) if r.reported_tau is not None else ""
        lines.append(
            f"{r.frequency!r},{r.conductivity!r},{r.rel_permittivity!r},"
            f"{tau},{CLASS_TO_LABEL[r.label]},{r.source_id}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------- #
# Standardization
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class StandardizationParams:
    """Per-feature z-score parameters fitted on the training split only."""

    feature_names: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        return (np.asarray(matrix, dtype=np.float64) - self.mean) / self.std

    def inverse_transform(self, matrix: np.ndarray) -> np.ndarray:
        return np.asarray(matrix, dtype=np.float64) * self.std + self.mean


def fit_standardizer(matrix: np.ndarray, feature_names: Sequence[str]) -> StandardizationParams:
    """Fit per-feature mean and population standard deviation.

    Raises ZeroVarianceError naming the offending feature if any column is
    constant on the training split.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise InvalidParameterError("training matrix must be 2-D and non-empty")
    if matrix.shape[1] != len(feature_names):
        raise InvalidParameterError(
            f"matrix has {matrix.shape[1]} columns but {len(feature_names)} feature names given"
        )
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)  # population (divide-by-n) std
    for j, s in enumerate(std):
        if s == 0.0:
            raise ZeroVarianceError(feature_names[j])
    return StandardizationParams(feature_names=tuple(feature_names), mean=mean, std=std)


# --------------------------------------------------------------------------- #
# Splitting
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class SplitSpec:
    """Train/test split parameters. Splits are disjoint and exhaustive."""

    train_fraction: float
    seed: int
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise InvalidParameterError(
                f"train_fraction must be in (0, 1), got {self.train_fraction}"
            )


def _train_count(n: int, fraction: float) -> int:
    # half-up rounding, clipped so both sides stay non-empty
    return min(max(int(math.floor(fraction * n + 0.5)), 1), n - 1)


def split(d: Dataset, s: SplitSpec) -> tuple[Dataset, Dataset]:
    """Deterministic train/test split, stratified per class by default."""
    n = len(d)
    if n < 2:
        raise InvalidParameterError(f"need at least 2 records to split, got {n}")
    rng = np.random.default_rng(s.seed)
    train_idx: list[int] = []
    test_idx: list[int] = []

    if s.stratified:
        for cls in CellClass:
            idx = [i for i, r in enumerate(d.records) if r.label == cls]
            if not idx:
                continue
            if len(idx) < 2:
                raise InvalidParameterError(
                    f"class {CLASS_TO_LABEL[cls]} has {len(idx)} record(s); "
                    "stratified splitting needs at least 2 per class"
                )
            perm = rng.permutation(len(idx))
            k = _train_count(len(idx), s.train_fraction)
            train_idx.extend(idx[p] for p in perm[:k])
            test_idx.extend(idx[p] for p in perm[k:])
    else:
        perm = rng.permutation(n)
        k = _train_count(n, s.train_fraction)
        train_idx = [int(p) for p in perm[:k]]
        test_idx = [int(p) for p in perm[k:]]

    train_idx.sort()
    test_idx.sort()
    source = d.provenance.source
    train = Dataset(
        records=tuple(d.records[i] for i in train_idx),
        provenance=Provenance(row_count=len(train_idx), file_hash=d.provenance.file_hash,
                              source=f"{source}#train"),
    )
    test = Dataset(
        records=tuple(d.records[i] for i in test_idx),
        provenance=Provenance(row_count=len(test_idx), file_hash=d.provenance.file_hash,
                              source=f"{source}#test"),
    )
    return train, test


# --------------------------------------------------------------------------- #
# Synthetic generator
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class ClassCalibration:
    """Sampling bands for one class's Cole-Cole parameters.

    eps_s_range            static permittivity band; class medians of the
                           emitted relative permittivity land inside it
    eps_inf_fraction_range eps_inf drawn as eps_s times this fraction
    tau_range_s            relaxation time band, sampled log-uniformly
    alpha_range            Cole-Cole broadening band
    sigma_range_s_per_m    ionic conductivity band
    count                  records to emit for this class
    """

    eps_s_range: tuple[float, float]
    eps_inf_fraction_range: tuple[float, float]
    tau_range_s: tuple[float, float]
    alpha_range: tuple[float, float]
    sigma_range_s_per_m: tuple[float, float]
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise InvalidParameterError(f"class count must be >= 1, got {self.count}")
        for name in ("eps_s_range", "eps_inf_fraction_range", "tau_range_s",
                     "alpha_range", "sigma_range_s_per_m"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise InvalidParameterError(f"{name} must be a finite (lo, hi) pair, got ({lo}, {hi})")
        if self.eps_s_range[0] <= 0:
            raise InvalidParameterError("eps_s_range must be positive")
        if not 0 < self.eps_inf_fraction_range[0] <= self.eps_inf_fraction_range[1] < 1:
            raise InvalidParameterError("eps_inf_fraction_range must lie in (0, 1)")
        if self.tau_range_s[0] <= 0:
            raise InvalidParameterError("tau_range_s must be positive")
        if not 0 <= self.alpha_range[0] <= self.alpha_range[1] <= 1:
            raise InvalidParameterError("alpha_range must lie in [0, 1]")
        if self.sigma_range_s_per_m[0] < 0:
            raise InvalidParameterError("sigma_range_s_per_m must be non-negative")


@dataclass(frozen=True)
class GeneratorSpec:
    """Synthetic corpus recipe: class calibrations plus sampling policy."""

    classes: dict[CellClass, ClassCalibration]
    freq_range_hz: tuple[float, float] = (1.5e5, 1.0e9)
    noise_level: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if set(self.classes) != set(CellClass):
            raise InvalidParameterError("generator spec must calibrate all three classes")
        lo, hi = self.freq_range_hz
        env_lo, env_hi = FREQUENCY_ENVELOPE_HZ
        if not (env_lo <= lo < hi <= env_hi):
            raise InvalidParameterError(
                f"freq_range_hz must lie within the corpus envelope [{env_lo:g}, {env_hi:g}]"
            )
        if not 0.0 <= self.noise_level < 1.0:
            raise InvalidParameterError(f"noise_level must be in [0, 1), got {self.noise_level}")

    def total_count(self) -> int:
        return sum(c.count for c in self.classes.values())


def default_generator_spec(seed: int = 0, total: int = 535, noise_level: float = 0.05) -> GeneratorSpec:
    """Calibration mirroring the compiled corpus: imbalanced three-class mix
    with permittivity medians near 7.2 / 18.3 / 59.15 and conductivity
    rising with malignancy. Class bands deliberately overlap so single
    thresholds cannot separate them."""
    fractions = {CellClass.NORMAL: 0.28, CellClass.BENIGN: 0.28, CellClass.MALIGNANT: 0.44}
    counts = {c: max(1, int(round(total * f))) for c, f in fractions.items()}
    counts[CellClass.MALIGNANT] += total - sum(counts.values())
    classes = {
        CellClass.NORMAL: ClassCalibration(
            eps_s_range=(5.4, 9.4),
            eps_inf_fraction_range=(0.2, 0.45),
            tau_range_s=(2.0e-9, 4.0e-8),
            alpha_range=(0.0, 0.25),
            sigma_range_s_per_m=(0.02, 0.30),
            count=counts[CellClass.NORMAL],
        ),
        CellClass.BENIGN: ClassCalibration(
            eps_s_range=(13.0, 24.0),
            eps_inf_fraction_range=(0.2, 0.45),
            tau_range_s=(2.0e-9, 4.0e-8),
            alpha_range=(0.0, 0.25),
            sigma_range_s_per_m=(0.12, 0.70),
            count=counts[CellClass.BENIGN],
        ),
        CellClass.MALIGNANT: ClassCalibration(
            eps_s_range=(45.0, 74.0),
            eps_inf_fraction_range=(0.2, 0.45),
            tau_range_s=(2.0e-9, 4.0e-8),
            alpha_range=(0.0, 0.25),
            sigma_range_s_per_m=(0.35, 1.60),
            count=counts[CellClass.MALIGNANT],
        ),
    }
    return GeneratorSpec(classes=classes, noise_level=noise_level, seed=seed)


def generate(g: GeneratorSpec) -> Dataset:
    """Emit a synthetic corpus by forward Cole-Cole evaluation.

    Each record samples class-conditioned dispersion parameters, evaluates
    the complex permittivity at a log-uniform frequency, takes the real part
    as relative permittivity and maps the total loss back to a measured
    conductivity via sigma = eps''_total * omega * eps0. Deterministic under
    the spec's seed.
    """
    rng = np.random.default_rng(g.seed)
    log_f_lo, log_f_hi = math.log10(g.freq_range_hz[0]), math.log10(g.freq_range_hz[1])
    records: list[SpectralRecord] = []

    for cls in CellClass:
        cal = g.classes[cls]
        log_t_lo, log_t_hi = math.log10(cal.tau_range_s[0]), math.log10(cal.tau_range_s[1])
        for i in range(cal.count):
            eps_s = rng.uniform(*cal.eps_s_range)
            eps_inf = eps_s * rng.uniform(*cal.eps_inf_fraction_range)
            tau = 10.0 ** rng.uniform(log_t_lo, log_t_hi)
            alpha = rng.uniform(*cal.alpha_range)
            sigma_i = rng.uniform(*cal.sigma_range_s_per_m)
            f = 10.0 ** rng.uniform(log_f_lo, log_f_hi)

            params = physics.ColeColeParams(
                eps_inf=eps_inf, eps_s=eps_s, tau=tau, alpha=alpha, sigma_i=sigma_i
            )
            eps = physics.cole_cole_permittivity(params, f)
            omega = 2.0 * math.pi * f
            rel_permittivity = eps.real
            conductivity = -eps.imag * omega * physics.EPS0

            if g.noise_level > 0:
                rel_permittivity *= 1.0 + g.noise_level * rng.standard_normal()
                conductivity *= 1.0 + g.noise_level * rng.standard_normal()
                reported_tau = tau * (1.0 + g.noise_level * rng.standard_normal())
            else:
                reported_tau = tau
            rel_permittivity = max(rel_permittivity, 1e-3)
            conductivity = max(conductivity, 0.0)
            reported_tau = max(reported_tau, 1e-15)

            records.append(SpectralRecord(
                frequency=f,
                conductivity=conductivity,
                rel_permittivity=rel_permittivity,
                reported_tau=reported_tau,
                label=cls,
                source_id=f"synthetic/{CLASS_TO_LABEL[cls]}/{i}",
            ))

    return Dataset(
        records=tuple(records),
        provenance=Provenance(row_count=len(records), source="generator"),
    )


# --------------------------------------------------------------------------- #
# JSON config parsing (documented schemas; see README)
# --------------------------------------------------------------------------- #

GENERATOR_CONFIG_SCHEMA_VERSION = 1


def generator_spec_from_dict(cfg: dict) -> GeneratorSpec:
    """Build a GeneratorSpec from its JSON configuration document."""
    version = cfg.get("schema_version", GENERATOR_CONFIG_SCHEMA_VERSION)
    if version > GENERATOR_CONFIG_SCHEMA_VERSION:
        raise SchemaError(
            f"generator config schema_version {version} is newer than supported "
            f"{GENERATOR_CONFIG_SCHEMA_VERSION}"
        )
    try:
        classes = {}
        for label, c in cfg["classes"].items():
            if label not in LABEL_TO_CLASS:
                raise SchemaError(f"unknown class label {label!r} in generator config")
            classes[LABEL_TO_CLASS[label]] = ClassCalibration(
                eps_s_range=tuple(c["eps_s_range"]),
                eps_inf_fraction_range=tuple(c["eps_inf_fraction_range"]),
                tau_range_s=tuple(c["tau_range_s"]),
                alpha_range=tuple(c["alpha_range"]),
                sigma_range_s_per_m=tuple(c["sigma_range_s_per_m"]),
                count=int(c["count"]),
            )
        return GeneratorSpec(
            classes=classes,
            freq_range_hz=tuple(cfg.get("freq_range_hz", (1.5e5, 1.0e9))),
            noise_level=float(cfg.get("noise_level", 0.05)),
            seed=int(cfg.get("seed", 0)),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"generator config missing or malformed field: {exc}") from exc


def split_spec_from_dict(cfg: dict) -> SplitSpec:
    try:
        return SplitSpec(
            train_fraction=float(cfg["train_fraction"]),
            seed=int(cfg["seed"]),
            stratified=bool(cfg.get("stratified", True)),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"split config missing or malformed field: {exc}") from exc
