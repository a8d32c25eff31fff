"""Historical price ingestion and annualized return/covariance statistics.

Daily changes use the change-over-current-price convention
r_k = (p_k - p_{k-1}) / p_k by default; the conventional previous-price
denominator is available behind a flag. Annualization assumes 252 trading
days and population (1/m) covariance normalization.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TRADING_DAYS_PER_YEAR = 252

_DENOMINATORS = ("current", "previous")


@dataclass(frozen=True)
class PriceSeries:
    """One asset's ordered daily prices (m+1 values, all strictly positive)."""

    asset_id: str
    prices: np.ndarray

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        if prices.ndim != 1 or prices.size < 2:
            raise ValueError(f"{self.asset_id}: need at least 2 prices, got shape {prices.shape}")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
            raise ValueError(f"{self.asset_id}: prices must be finite and strictly positive")
        prices.flags.writeable = False
        object.__setattr__(self, "prices", prices)


@dataclass(frozen=True)
class MarketStats:
    """Annualized return vector and covariance matrix for a set of assets."""

    asset_ids: tuple[str, ...]
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        sigma = np.asarray(self.sigma, dtype=float)
        n = len(self.asset_ids)
        if mu.shape != (n,):
            raise ValueError(f"mu shape {mu.shape} inconsistent with {n} assets")
        if sigma.shape != (n, n):
            raise ValueError(f"sigma shape {sigma.shape} inconsistent with {n} assets")
        if not np.allclose(sigma, sigma.T, atol=1e-12, rtol=0.0):
            raise ValueError("sigma must be symmetric")
        if np.any(np.diag(sigma) < 0):
            raise ValueError("sigma diagonal must be non-negative")
        mu.flags.writeable = False
        sigma.flags.writeable = False
        object.__setattr__(self, "asset_ids", tuple(self.asset_ids))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def n(self) -> int:
        return len(self.asset_ids)

    def select(self, indices: Sequence[int]) -> "MarketStats":
        """Sub-basket restricted to the given asset indices, in the given order."""
        idx = np.asarray(indices, dtype=int)
        return MarketStats(
            asset_ids=tuple(self.asset_ids[i] for i in idx),
            mu=self.mu[idx].copy(),
            sigma=self.sigma[np.ix_(idx, idx)].copy(),
        )


def daily_changes(series, denominator: str = "current") -> np.ndarray:
    """Daily percentage price changes r_k for k = 1..m.

    ``denominator="current"`` divides by p_k; ``"previous"`` divides by
    p_{k-1} (compatibility mode).
    """
    if denominator not in _DENOMINATORS:
        raise ValueError(f"denominator must be one of {_DENOMINATORS}")
    prices = series.prices if isinstance(series, PriceSeries) else np.asarray(series, dtype=float)
    if prices.size < 2:
        raise ValueError("need at least 2 prices")
    if np.any(prices <= 0) or not np.all(np.isfinite(prices)):
        raise ValueError("prices must be finite and strictly positive")
    diff = prices[1:] - prices[:-1]
    denom = prices[1:] if denominator == "current" else prices[:-1]
    return diff / denom


def annualized_return(changes) -> float:
    """Geometric annualization [prod_k (1 + r_k)]^(252/m)."""
    r = np.asarray(changes, dtype=float)
    if r.size == 0:
        raise ValueError("empty change vector")
    if np.any(1.0 + r <= 0.0):
        raise ValueError("annualized return undefined: some 1 + r_k <= 0")
    m = r.size
    return float(np.exp((TRADING_DAYS_PER_YEAR / m) * np.sum(np.log1p(r))))


def annualized_covariance(changes_a, changes_b) -> float:
    """Population covariance of two change series, scaled by 252/m."""
    a = np.asarray(changes_a, dtype=float)
    b = np.asarray(changes_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("change vectors must be 1-d with equal length")
    if a.size == 0:
        raise ValueError("empty change vector")
    m = a.size
    da = a - a.mean()
    db = b - b.mean()
    return float((TRADING_DAYS_PER_YEAR / m) * np.dot(da, db))


def build_market_stats(series_list: Sequence[PriceSeries], denominator: str = "current") -> MarketStats:
    """Annualized stats for a basket; all series must cover the same days."""
    if not series_list:
        raise ValueError("no price series given")
    lengths = {s.prices.size for s in series_list}
    if len(lengths) != 1:
        raise ValueError(f"series lengths differ: {sorted(lengths)}")
    changes = np.column_stack([daily_changes(s, denominator) for s in series_list])
    mu = np.array([annualized_return(changes[:, i]) for i in range(changes.shape[1])])
    m = changes.shape[0]
    centered = changes - changes.mean(axis=0)
    sigma = (TRADING_DAYS_PER_YEAR / m) * (centered.T @ centered)
    sigma = 0.5 * (sigma + sigma.T)  # exact symmetry despite BLAS rounding
    return MarketStats(tuple(s.asset_id for s in series_list), mu, sigma)


# ---------------------------------------------------------------------------
# CSV interfaces
# ---------------------------------------------------------------------------


def load_price_csv(path) -> list[PriceSeries]:
    """Read a `date,<asset_id>,...` daily price table.

    Any row with a missing or non-positive price is rejected (no imputation).
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if not header or header[0].lower() != "date" or len(header) < 2:
        raise ValueError(f"{path}: expected header 'date,<asset_id>,...'")
    asset_ids = header[1:]
    columns: list[list[float]] = [[] for _ in asset_ids]
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        for j, cell in enumerate(row[1:]):
            cell = cell.strip()
            if not cell:
                raise ValueError(f"{path}:{lineno}: missing price for {asset_ids[j]}")
            try:
                value = float(cell)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad price {cell!r} for {asset_ids[j]}") from None
            if value <= 0:
                raise ValueError(f"{path}:{lineno}: non-positive price for {asset_ids[j]}")
            columns[j].append(value)
    return [PriceSeries(aid, np.array(col)) for aid, col in zip(asset_ids, columns)]


def load_stats_csv(covariance_path, returns_path) -> MarketStats:
    """Read pre-computed stats from the two-file layout.

    The covariance file is an n x n table with an asset-id header row and
    label column; the returns file is a two-column asset-id,value table
    (optional header tolerated).
    """
    with open(covariance_path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    header = [h.strip() for h in rows[0]]
    asset_ids = header[1:]
    n = len(asset_ids)
    if n == 0 or len(rows) != n + 1:
        raise ValueError(f"{covariance_path}: malformed covariance table")
    sigma = np.empty((n, n))
    for i, row in enumerate(rows[1:]):
        if len(row) != n + 1 or row[0].strip() != asset_ids[i]:
            raise ValueError(f"{covariance_path}: row {i + 2} does not match header order")
        sigma[i] = [float(v) for v in row[1:]]

    returns: dict[str, float] = {}
    with open(returns_path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{returns_path}: expected two columns")
            try:
                returns[row[0].strip()] = float(row[1])
            except ValueError:
                if returns:
                    raise ValueError(f"{returns_path}: bad value {row[1]!r}") from None
                continue  # header row
    missing = [a for a in asset_ids if a not in returns]
    if missing:
        raise ValueError(f"{returns_path}: missing returns for {missing}")
    mu = np.array([returns[a] for a in asset_ids])
    return MarketStats(tuple(asset_ids), mu, 0.5 * (sigma + sigma.T))


def save_stats_csv(stats: MarketStats, covariance_path, returns_path) -> None:
    """Write stats in the same two-file layout accepted by load_stats_csv."""
    Path(covariance_path).parent.mkdir(parents=True, exist_ok=True)
    with open(covariance_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + list(stats.asset_ids))
        for i, aid in enumerate(stats.asset_ids):
            writer.writerow([aid] + [repr(float(v)) for v in stats.sigma[i]])
    with open(returns_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["asset", "annualized_return"])
        for aid, value in zip(stats.asset_ids, stats.mu):
            writer.writerow([aid, repr(float(value))])


def synthetic_stats_pool(n_assets: int, seed: int = 0, sectors: int = 5) -> MarketStats:
    """Annualized stats drawn directly at index-like magnitudes.

    A one-market-factor plus sector-factor model: correlations are mostly
    positive, strong within a sector and moderate across sectors, so baskets
    mixing sectors show a broad correlation spread while single-sector
    baskets look uniform. Returns land in [-0.15, 0.35] and covariance
    diagonals in roughly [0.02, 0.2], matching the scale of the bundled
    reference tables; use this pool with protocols that fix the penalty and
    scale factors instead of calibrating them per instance.
    """
    if n_assets < 1:
        raise ValueError("need n_assets >= 1")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    mu = rng.uniform(-0.15, 0.35, size=n_assets)
    market_beta = rng.uniform(0.5, 1.2, size=n_assets)
    sector_of = rng.integers(0, sectors, size=n_assets)
    sector_beta = rng.uniform(0.4, 0.9, size=n_assets)
    idio = rng.uniform(0.08, 0.25, size=n_assets)
    market_vol, sector_vol = 0.16, 0.13
    sigma = market_vol**2 * np.outer(market_beta, market_beta)
    for s in range(sectors):
        g = np.where(sector_of == s, sector_beta, 0.0)
        sigma += sector_vol**2 * np.outer(g, g)
    sigma += np.diag(idio**2)
    return MarketStats(
        tuple(f"S{i:02d}" for i in range(n_assets)), mu, 0.5 * (sigma + sigma.T)
    )


def synthetic_price_pool(n_assets: int, days: int = 504, seed: int = 0) -> list[PriceSeries]:
    """Correlated geometric random-walk prices for benchmark instance pools."""
    if n_assets < 1 or days < 2:
        raise ValueError("need n_assets >= 1 and days >= 2")
    rng = np.random.Generator(np.random.Philox(key=seed))
    vol = rng.uniform(0.005, 0.030, size=n_assets)
    drift = rng.uniform(-0.0010, 0.0022, size=n_assets)
    loading = rng.uniform(-0.7, 0.9, size=n_assets)
    common = rng.standard_normal(days - 1)
    idio = rng.standard_normal((days - 1, n_assets))
    shocks = loading * common[:, None] + np.sqrt(1.0 - loading**2) * idio
    rel = drift + vol * shocks
    rel = np.clip(rel, -0.5, 0.5)
    start = rng.uniform(20.0, 200.0, size=n_assets)
    prices = start * np.cumprod(np.vstack([np.ones(n_assets), 1.0 + rel]), axis=0)
    return [PriceSeries(f"A{i:02d}", prices[:, i]) for i in range(n_assets)]
