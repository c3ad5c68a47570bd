"""Thermodynamic formalism for locally constant potentials on a subshift.

A depth-n potential assigns a real value to every admissible n-word of a
:class:`~graphtherm.graphs.TransitionStructure`.  Pressure, entropy,
equilibrium states, asymptotic variance and pressure derivatives are all
computed from the weighted transfer matrix over admissible word states, with
brute-force periodic-orbit enumerations as the independent oracles.

Conventions
-----------
* A depth-1 potential weights the first symbol of a word; in the weighted
  matrix its exponential sits in the column factor, ``M[i, j] = A[i, j] *
  exp(F(j))``.  Deeper potentials are recoded onto the graph whose states
  are admissible (n-1)-words, the value of the joined n-word sitting on the
  transition.  Both placements are conjugate and leave pressure and the
  equilibrium chain unchanged; the tests check this.
* Pressure is evaluated with a log-domain shift so large potentials cannot
  overflow the matrix exponentials.
* Irreducibility of the shift is required; aperiodicity is not.  Bipartite
  graphs (the theta graph is one) have period-2 directed-edge shifts, and
  their Perron data and stationary chains are still unique.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import accel
from .errors import (
    GraphThermError,
    InputFormatError,
    InvalidPotentialError,
    ReducibleShiftError,
    ResourceLimitError,
)
from .graphs import (
    ClosedGeodesic,
    MetricGraph,
    TransitionStructure,
    enumerate_closed_geodesics,
    DEFAULT_ENUMERATION_CAP,
)

__all__ = [
    "Potential",
    "WeightedMatrix",
    "EquilibriumState",
    "edge_length_potential",
    "rates_potential",
    "constant_potential",
    "linear_combination",
    "lift_potential",
    "validate_potential",
    "weighted_matrix",
    "pressure",
    "pressure_by_counting",
    "topological_entropy",
    "entropy_by_counting",
    "equilibrium_state",
    "markov_entropy",
    "integrate",
    "cylinder_mass",
    "variance",
    "livsic_period",
    "is_cohomologous",
    "potential_to_dict",
    "potential_from_dict",
]

PERRON_TOL = 1e-14
PERRON_MAX_ITER = 100_000
DENSE_FALLBACK_DIM = 200


@dataclass(frozen=True)
class Potential:
    """Depth-n locally constant function given by its values on n-words."""

    depth: int
    values: dict

    def __post_init__(self):
        if self.depth < 1:
            raise InvalidPotentialError("potential depth must be >= 1")
        for word in self.values:
            if len(word) != self.depth:
                raise InvalidPotentialError(
                    f"word {word!r} has length {len(word)}, expected {self.depth}"
                )

    def scaled(self, a: float) -> "Potential":
        return Potential(self.depth, {w: a * v for w, v in self.values.items()})

    def shifted(self, c: float) -> "Potential":
        return Potential(self.depth, {w: v + c for w, v in self.values.items()})

    def is_positive(self) -> bool:
        return all(v > 0 for v in self.values.values())

    def value(self, word) -> float:
        try:
            return self.values[tuple(word)]
        except KeyError:
            raise InvalidPotentialError(
                f"word {tuple(word)!r} is not admissible for this potential"
            ) from None


def edge_length_potential(graph: MetricGraph) -> Potential:
    """The depth-1 potential induced by a metric: l(e) on both orientations."""
    values = {}
    for name in graph.edge_names:
        values[("+" + name,)] = float(graph.lengths[name])
        values[("-" + name,)] = float(graph.lengths[name])
    return Potential(1, values)


def rates_potential(graph: MetricGraph, rates) -> Potential:
    """Depth-1 potential from per-edge rates (used for tangent directions)."""
    values = {}
    for name in graph.edge_names:
        r = float(rates[name])
        values[("+" + name,)] = r
        values[("-" + name,)] = r
    return Potential(1, values)


def constant_potential(ts: TransitionStructure, c: float) -> Potential:
    return Potential(1, {(s,): float(c) for s in ts.symbols})


def lift_potential(ts: TransitionStructure, p: Potential, depth: int) -> Potential:
    """Re-express a potential at a larger depth; the value of a word is the
    value of its length-d suffix."""
    if depth < p.depth:
        raise InvalidPotentialError("cannot lift to a smaller depth")
    if depth == p.depth:
        return p
    values = {}
    for word in ts.admissible_words(depth):
        values[word] = p.values[word[depth - p.depth :]]
    return Potential(depth, values)


def linear_combination(ts: TransitionStructure, terms) -> Potential:
    """sum(coef * potential) over (coef, potential) pairs, lifted to a common depth."""
    if not terms:
        raise InvalidPotentialError("empty linear combination")
    depth = max(p.depth for _, p in terms)
    lifted = [(a, lift_potential(ts, p, depth)) for a, p in terms]
    keys = lifted[0][1].values.keys()
    values = {w: sum(a * p.values[w] for a, p in lifted) for w in keys}
    return Potential(depth, values)


def validate_potential(ts: TransitionStructure, p: Potential) -> None:
    expected = set(ts.admissible_words(p.depth))
    got = set(p.values.keys())
    missing = expected - got
    extra = got - expected
    if missing:
        raise InvalidPotentialError(
            f"potential misses {len(missing)} admissible words, e.g. {sorted(missing)[0]!r}"
        )
    if extra:
        raise InvalidPotentialError(
            f"potential has {len(extra)} non-admissible words, e.g. {sorted(extra)[0]!r}"
        )


# ---------------------------------------------------------------------------
# Transfer matrix over admissible word states
# ---------------------------------------------------------------------------


def _state_words(ts: TransitionStructure, word_len: int):
    return [ts.word_indices(w) for w in ts.admissible_words(word_len)]


def _placement_depth(p: Potential) -> int:
    return max(p.depth, 2) - 1


def _transition_value_matrix(ts, states, potential):
    """Matrix of potential values on state transitions.

    The transition (w, w') carries the value of the last depth symbols of the
    joined word w + w'[-1]; for depth-1 potentials this is the column symbol.
    """
    m = len(states[0])
    if _placement_depth(potential) > m:
        raise InvalidPotentialError(
            f"potential depth {potential.depth} too deep for word length {m}"
        )
    index = {w: i for i, w in enumerate(states)}
    n = len(states)
    val = np.zeros((n, n))
    adj = np.zeros((n, n), dtype=np.uint8)
    d = potential.depth
    for i, w in enumerate(states):
        for j_sym in np.nonzero(ts.adjacency[w[-1]])[0]:
            w2 = w[1:] + (int(j_sym),)
            j = index.get(w2)
            if j is None:
                continue
            adj[i, j] = 1
            joined = w + (int(j_sym),)
            key = tuple(ts.symbols[t] for t in joined[len(joined) - d :])
            val[i, j] = potential.values[key]
    return adj, val


@dataclass(frozen=True, eq=False)
class WeightedMatrix:
    """exp-weighted transfer matrix with its Perron data.

    ``matrix`` holds A(w, w') * exp(value - log_scale); the pressure of the
    underlying potential is log(rho) + log_scale.  ``left`` and ``right`` are
    the Perron vectors normalised so that left @ right = 1 and sum(right) = 1.
    """

    states: tuple
    adjacency: np.ndarray
    matrix: np.ndarray
    rho: float
    left: np.ndarray
    right: np.ndarray
    log_scale: float

    @property
    def pressure(self):
        return math.log(self.rho) + self.log_scale


def _perron(mat):
    """Perron root and strictly positive left/right vectors."""
    k = mat.shape[0]
    if k < DENSE_FALLBACK_DIM:
        rho, r, lv = _perron_dense(mat)
    else:
        rho, r, lv, converged = accel.power_iteration(mat, PERRON_TOL, PERRON_MAX_ITER)
        if not converged:
            raise GraphThermError(
                "power iteration did not converge and matrix too large for dense solve"
            )
        rho, r, lv = float(rho), np.asarray(r), np.asarray(lv)
    if r.min() <= 0 or lv.min() <= 0:
        raise ReducibleShiftError("Perron vectors not strictly positive")
    r = r / r.sum()
    lv = lv / float(lv @ r)
    return rho, r, lv


def _perron_dense(mat):
    w, v = np.linalg.eig(mat)
    i = int(np.argmax(w.real))
    rho = float(w[i].real)
    r = v[:, i].real
    w2, v2 = np.linalg.eig(mat.T)
    j = int(np.argmax(w2.real))
    lv = v2[:, j].real
    if r[np.argmax(np.abs(r))] < 0:
        r = -r
    if lv[np.argmax(np.abs(lv))] < 0:
        lv = -lv
    return rho, r, lv


def weighted_matrix(ts: TransitionStructure, potential: Potential) -> WeightedMatrix:
    if not ts.irreducible:
        raise ReducibleShiftError("transition structure is not irreducible")
    m = _placement_depth(potential)
    states = _state_words(ts, m)
    adj, val = _transition_value_matrix(ts, states, potential)
    finite = val[adj == 1]
    scale = float(finite.max()) if finite.size else 0.0
    mat = np.where(adj == 1, np.exp(val - scale), 0.0)
    rho, r, lv = _perron(mat)
    return WeightedMatrix(
        states=tuple(states),
        adjacency=adj,
        matrix=mat,
        rho=rho,
        left=lv,
        right=r,
        log_scale=scale,
    )


def pressure(ts: TransitionStructure, potential: Potential) -> float:
    """log of the Perron value of the weighted transfer matrix."""
    return weighted_matrix(ts, potential).pressure


def pressure_by_counting(
    ts: TransitionStructure, potential: Potential, n_max: int, cap=DEFAULT_ENUMERATION_CAP
) -> float:
    """Finite-n periodic-orbit estimate of the pressure (the definition oracle).

    Returns (1/n) log sum(exp(Birkhoff sum)) over the fixed points of the
    n-th shift power, by explicit enumeration; converges to pressure as
    n grows.  Returns -inf when there are no period-n points (bipartite
    shifts at odd n).
    """
    if n_max < 1:
        raise GraphThermError("n_max must be >= 1")
    a = ts.adjacency.astype(np.float64)
    if float(np.trace(np.linalg.matrix_power(a, n_max))) > cap:
        raise ResourceLimitError(f"period-{n_max} point count exceeds cap {cap}")
    m = _placement_depth(potential)
    states = _state_words(ts, m)
    adj, val = _transition_value_matrix(ts, states, potential)
    finite = val[adj == 1]
    shift = n_max * (float(finite.max()) if finite.size else 0.0)
    acc, _count = accel.periodic_weight_sum(adj, val, n_max, shift)
    if acc == 0.0:
        return -math.inf
    return (math.log(acc) + shift) / n_max


@dataclass(frozen=True, eq=False)
class EquilibriumState:
    """Stationary Markov chain of the equilibrium measure of a potential.

    ``states`` are admissible words of length ``word_len``; ``pi`` is the
    stationary distribution, ``q`` the row-stochastic transition matrix with
    support exactly on the admissible transitions, and ``pressure`` the
    pressure of the potential.
    """

    ts: TransitionStructure = field(repr=False)
    potential: Potential = field(repr=False)
    states: tuple
    pi: np.ndarray
    q: np.ndarray
    pressure: float
    wm: WeightedMatrix = field(repr=False)

    @property
    def word_len(self):
        return len(self.states[0])

    def residuals(self):
        """(stationarity, row-sum) residuals for the invariant checks."""
        stat = float(np.abs(self.pi @ self.q - self.pi).max())
        rows = float(np.abs(self.q.sum(axis=1) - 1.0).max())
        return {"stationarity": stat, "row_sums": rows}


def equilibrium_state(
    ts: TransitionStructure, potential: Potential, min_word_len: int = 1
) -> EquilibriumState:
    """Equilibrium state of a potential: Q(i,j) = M(i,j) r_j / (rho r_i), pi = l*r."""
    m = max(_placement_depth(potential), min_word_len)
    lifted = potential
    if m > _placement_depth(potential):
        lifted = lift_potential(ts, potential, m + 1)
    wm = weighted_matrix(ts, lifted)
    k = len(wm.states)
    q = np.zeros((k, k))
    for i in range(k):
        row = wm.matrix[i] * wm.right / (wm.rho * wm.right[i])
        q[i] = row
    q = q / q.sum(axis=1, keepdims=True)
    pi = wm.left * wm.right
    pi = pi / pi.sum()
    states = tuple(tuple(ts.symbols[t] for t in w) for w in wm.states)
    return EquilibriumState(
        ts=ts,
        potential=potential,
        states=states,
        pi=pi,
        q=q,
        pressure=wm.pressure,
        wm=wm,
    )


def markov_entropy(state: EquilibriumState) -> float:
    """Entropy rate -sum pi_i Q_ij log Q_ij of the stationary chain."""
    q = state.q
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(q > 0, q * np.log(q), 0.0)
    return float(-(state.pi @ plogp.sum(axis=1)))


def cylinder_mass(state: EquilibriumState, word) -> float:
    """Equilibrium measure of the cylinder of an admissible word."""
    word = tuple(word)
    m = state.word_len
    index = {w: i for i, w in enumerate(state.states)}
    if len(word) <= m:
        total = 0.0
        for w, i in index.items():
            if w[: len(word)] == word:
                total += float(state.pi[i])
        return total
    try:
        i = index[word[:m]]
    except KeyError:
        raise InvalidPotentialError(f"word {word!r} is not admissible") from None
    mass = float(state.pi[i])
    for start in range(1, len(word) - m + 1):
        j = index.get(word[start : start + m])
        if j is None:
            raise InvalidPotentialError(f"word {word!r} is not admissible")
        mass *= float(state.q[i, j])
        i = j
    return mass


def integrate(potential: Potential, state: EquilibriumState) -> float:
    """integral of a locally constant potential against the equilibrium measure."""
    unknown = [s for w in potential.values for s in w if s not in state.ts.symbols]
    if unknown:
        raise InvalidPotentialError(
            f"potential symbol {unknown[0]!r} not in the state's alphabet"
        )
    m = state.word_len
    d = potential.depth
    if d <= m:
        # marginalise state masses over the leading d symbols
        sums = {}
        for w, p in zip(state.states, state.pi):
            key = w[:d]
            sums[key] = sums.get(key, 0.0) + float(p)
        return float(sum(sums[w] * v for w, v in potential.values.items()))
    return float(
        sum(cylinder_mass(state, w) * v for w, v in potential.values.items())
    )


def variance(
    potential: Potential, state: EquilibriumState, subtract_mean: bool = False
) -> float:
    """Asymptotic variance of Birkhoff sums under the equilibrium measure.

    Computed as the second derivative of log rho under the entrywise
    perturbation M * exp(eps G), via first-order eigenvector perturbation
    (the finite-difference Hessian of the pressure is the test oracle).
    Requires integrate(potential, state) = 0 within 1e-10 unless
    ``subtract_mean`` is set, in which case the centred potential is used.
    """
    mean = integrate(potential, state)
    if abs(mean) > 1e-10 and not subtract_mean:
        raise InvalidPotentialError(
            f"potential is not centred (mean {mean:.3e}); pass subtract_mean=True"
        )
    m = max(state.word_len, _placement_depth(potential))
    if m > state.word_len:
        state = equilibrium_state(state.ts, state.potential, min_word_len=m)
    wm = state.wm
    states_idx = [state.ts.word_indices(w) for w in state.states]
    adj, gval = _transition_value_matrix(state.ts, states_idx, potential)
    if not np.array_equal(adj, wm.adjacency):
        raise InvalidPotentialError("potential support differs from the state's shift")
    gval = np.where(adj == 1, gval - mean, 0.0)
    mat = wm.matrix
    rho = wm.rho
    lv = wm.left
    r = wm.right
    b = mat * gval
    c = mat * gval * gval
    rho1 = float(lv @ b @ r)
    # solve (M - rho I) r1 = rho1 r - B r with l @ r1 = 0 (bordered system)
    k = mat.shape[0]
    bordered = np.zeros((k + 1, k + 1))
    bordered[:k, :k] = mat - rho * np.eye(k)
    bordered[:k, k] = r
    bordered[k, :k] = lv
    rhs = np.zeros(k + 1)
    rhs[:k] = rho1 * r - b @ r
    sol = np.linalg.solve(bordered, rhs)
    r1 = sol[:k]
    rho2 = float(lv @ b @ r1) + 0.5 * float(lv @ c @ r)
    var = 2.0 * rho2 / rho - (rho1 / rho) ** 2
    if var < 0:
        if var > -1e-10:
            return 0.0
        raise GraphThermError(f"variance came out negative ({var:.3e})")
    return float(var)


# ---------------------------------------------------------------------------
# Entropy
# ---------------------------------------------------------------------------


def topological_entropy(ts: TransitionStructure, potential: Potential) -> float:
    """The unique h with pressure(-h F) = 0, for strictly positive F.

    Bracketing plus bisection to an interval of width 1e-12, then three
    Newton polish steps using dP/ds = -integral of F.
    """
    if not potential.is_positive():
        raise InvalidPotentialError("topological entropy needs a strictly positive potential")

    def press(s):
        return pressure(ts, potential.scaled(-s))

    p0 = press(0.0)
    if p0 <= 0:
        raise GraphThermError("pressure at s=0 is not positive; no entropy root")
    hi = 1.0
    for _ in range(80):
        if press(hi) < 0:
            break
        hi *= 2.0
    else:
        raise GraphThermError("failed to bracket the entropy root")
    lo = 0.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if press(mid) > 0:
            lo = mid
        else:
            hi = mid
    h = 0.5 * (lo + hi)
    for _ in range(3):
        st = equilibrium_state(ts, potential.scaled(-h))
        dp = integrate(potential, st)
        h = h + st.pressure / dp
    return h


def entropy_by_counting(
    ts: TransitionStructure, graph: MetricGraph, big_t: float, cap=DEFAULT_ENUMERATION_CAP
) -> float:
    """Orbit-growth estimate log|R_T| / T of the entropy of a metric.

    R_T counts periodic directed-edge sequences: every closed geodesic of
    period p contributes one entry per distinct rotation and per period
    (proper powers enter with their multiplied-up length), which makes
    |R_T| = sum over feasible p of #{x : sigma^p x = x, length < T}.
    """
    if big_t <= 0:
        raise GraphThermError("T must be positive")
    min_len = min(graph.lengths.values())
    max_p = int(math.floor(big_t / min_len))
    if max_p < 1:
        raise GraphThermError(f"no geodesics below T={big_t}")
    count = 0
    for g in enumerate_closed_geodesics(ts, max_p, cap=cap):
        length = sum(graph.lengths[s[1:]] for s in g.word)
        if length < big_t:
            count += g.primitive_period
    if count == 0:
        raise GraphThermError(f"no geodesics below T={big_t}")
    return math.log(count) / big_t


# ---------------------------------------------------------------------------
# Livsic periods
# ---------------------------------------------------------------------------


def livsic_period(g: ClosedGeodesic, potential: Potential) -> float:
    """Birkhoff sum of the potential over one period of a closed geodesic."""
    p = g.period
    d = potential.depth
    total = 0.0
    for i in range(p):
        key = tuple(g.word[(i + j) % p] for j in range(d))
        total += potential.value(key)
    return total


def is_cohomologous(
    f1: Potential,
    f2: Potential,
    ts: TransitionStructure,
    max_period: int,
    tol: float = 1e-10,
) -> bool:
    """Necessary-condition test: equal periods on all orbits up to max_period."""
    for g in enumerate_closed_geodesics(ts, max_period):
        if abs(livsic_period(g, f1) - livsic_period(g, f2)) > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# JSON interface: {"depth": n, "values": {"sym.sym": value}}
# ---------------------------------------------------------------------------


def potential_to_dict(p: Potential):
    return {
        "depth": p.depth,
        "values": {".".join(w): v for w, v in sorted(p.values.items())},
    }


def potential_from_dict(data) -> Potential:
    if not isinstance(data, dict) or "depth" not in data or "values" not in data:
        raise InputFormatError("potential file: need keys 'depth' and 'values'")
    depth = data["depth"]
    if not isinstance(depth, int) or depth < 1:
        raise InputFormatError("potential file: depth must be a positive integer")
    values = {}
    for key, v in data["values"].items():
        word = tuple(key.split("."))
        if len(word) != depth:
            raise InputFormatError(
                f"potential file: word {key!r} does not have depth {depth}"
            )
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise InputFormatError(f"potential file: value of {key!r} must be a number")
        values[word] = float(v)
    return Potential(depth, values)


def load_potential(path) -> Potential:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read potential file {path}: {exc}") from exc
    return potential_from_dict(data)
