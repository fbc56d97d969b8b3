"""
Data models with type safety for the eigenfunction lab.
Uses dataclasses for the parameter, configuration and result records that
flow between the engines, the services and the command line.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, List, Dict, Any, Tuple
from enum import Enum

import numpy as np

from .errors import ParameterError, PreconditionError, DimensionError


class Representation(Enum):
    DIRECT = "direct"
    VIA_J = "via_j"
    RESIDUE = "residue"


class AsymptoticMode(Enum):
    U_PRODUCT = "u_product"
    C_RATIO = "c_ratio"


@dataclass(frozen=True)
class Params:
    """The couple (a+, a-) and its derived constants"""
    a_plus: float
    a_minus: float

    def __post_init__(self):
        for name, value in (("a_plus", self.a_plus), ("a_minus", self.a_minus)):
            if not math.isfinite(value) or value <= 0:
                raise ParameterError(f"{name} must be a positive finite length, got {value}")

    @property
    def alpha(self) -> float:
        return 2.0 * math.pi / (self.a_plus * self.a_minus)

    @property
    def a(self) -> float:
        return 0.5 * (self.a_plus + self.a_minus)

    @property
    def a_s(self) -> float:
        return min(self.a_plus, self.a_minus)

    @property
    def a_l(self) -> float:
        return max(self.a_plus, self.a_minus)

    def swapped(self) -> "Params":
        return Params(self.a_minus, self.a_plus)


@dataclass(frozen=True)
class Coupling:
    """Coupling b together with the parameters it is measured against"""
    params: Params
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "b", complex(self.b))
        if not (math.isfinite(self.b.real) and math.isfinite(self.b.imag)):
            raise ParameterError(f"Coupling b must be finite, got {self.b}")
        if not self.in_s_a():
            raise PreconditionError(
                f"Coupling b={self.b} lies outside the strip S_a: 0 < Re b < 2a = {2 * self.params.a}"
            )

    @property
    def gamma(self) -> float:
        return self.params.alpha * self.b.real / 2.0

    @property
    def beta(self) -> float:
        return min(self.b.real, self.params.a_s)

    @property
    def dual(self) -> complex:
        """The reflected coupling 2a - b carried by the rapidity factors"""
        return 2.0 * self.params.a - self.b

    def in_s_a(self) -> bool:
        return 0.0 < self.b.real < 2.0 * self.params.a

    def in_s_l(self) -> bool:
        return 0.0 < self.b.real <= self.params.a_l


@dataclass(frozen=True)
class Configuration:
    """Positions x (complex) and rapidities y (real) for N particles"""
    x: Tuple[complex, ...]
    y: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(complex(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) < 1:
            raise DimensionError("Configuration needs at least one particle")
        if len(self.x) != len(self.y):
            raise DimensionError(f"x has {len(self.x)} entries but y has {len(self.y)}")

    @property
    def n(self) -> int:
        return len(self.x)

    def distinct_x(self) -> bool:
        return all(self.x[j] != self.x[k] for j in range(self.n) for k in range(j + 1, self.n))

    def ordered_y(self) -> bool:
        return self.n < 2 or all(self.y[j] > self.y[k] for j in range(self.n) for k in range(j + 1, self.n))

    def as_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.x, dtype=complex), np.asarray(self.y, dtype=float)


@dataclass(frozen=True)
class ContourSpec:
    """Tensor-product panel rule over shifted real lines

    Axis k integrates over [-T, T] + i*offsets[k], split into equal panels
    (and additionally at any breakpoints) with Gauss-Legendre nodes.
    """
    dims: int
    offsets: Tuple[float, ...]
    truncation: float
    panels: int
    nodes_per_panel: int
    breakpoints: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(float(v) for v in self.offsets))
        object.__setattr__(self, "breakpoints", tuple(sorted(float(v) for v in self.breakpoints)))
        if self.dims < 1:
            raise ParameterError(f"dims must be at least 1, got {self.dims}")
        if len(self.offsets) != self.dims:
            raise DimensionError(f"Expected {self.dims} offsets, got {len(self.offsets)}")
        if not all(math.isfinite(v) for v in self.offsets):
            raise ParameterError("Contour offsets must be finite")
        if not (math.isfinite(self.truncation) and self.truncation > 0):
            raise ParameterError(f"Truncation must be positive, got {self.truncation}")
        if self.panels < 1:
            raise ParameterError(f"panels must be at least 1, got {self.panels}")
        if self.nodes_per_panel < 2:
            raise ParameterError(f"nodes_per_panel must be at least 2, got {self.nodes_per_panel}")

    def panel_edges(self) -> np.ndarray:
        edges = np.linspace(-self.truncation, self.truncation, self.panels + 1)
        inner = [p for p in self.breakpoints if -self.truncation < p < self.truncation]
        return np.unique(np.concatenate([edges, inner]))

    @property
    def nodes_per_axis(self) -> int:
        return (len(self.panel_edges()) - 1) * self.nodes_per_panel

    @property
    def total_nodes(self) -> int:
        return self.nodes_per_axis ** self.dims

    def halved(self) -> "ContourSpec":
        """Same panels with half the nodes, the coarse rule of the error estimate"""
        return ContourSpec(self.dims, self.offsets, self.truncation, self.panels,
                           max(2, self.nodes_per_panel // 2), self.breakpoints)

    def with_dims(self, dims: int, offset: Optional[float] = None) -> "ContourSpec":
        off = self.offsets[0] if offset is None else offset
        return ContourSpec(dims, (off,) * dims, self.truncation, self.panels,
                           self.nodes_per_panel, self.breakpoints)

    @property
    def grid_id(self) -> str:
        return (f"T{self.truncation:.12g}_p{self.panels}_n{self.nodes_per_panel}"
                f"_bp{','.join(f'{p:.12g}' for p in self.breakpoints)}")


@dataclass
class EvalResult:
    """Value of an integral-based evaluation with its error estimate"""
    value: complex
    error_estimate: float
    evaluations: int
    cache_hits: int = 0
    cache_misses: int = 0

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError(f"error_estimate must be non-negative, got {self.error_estimate}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'value_re': float(np.real(self.value)),
            'value_im': float(np.imag(self.value)),
            'error_estimate': float(self.error_estimate),
            'evaluations': int(self.evaluations),
        }


@dataclass
class DecayFit:
    """Least-squares fit of log|remainder| against the rapidity gap"""
    separations: np.ndarray
    residual_logs: np.ndarray
    fitted_rate: float
    fitted_intercept: float
    r_squared: float
    threshold: float = 0.0

    @property
    def passed(self) -> bool:
        return self.fitted_rate >= self.threshold

    def summary(self) -> Dict[str, Any]:
        return {
            'fitted_rate': float(self.fitted_rate),
            'fitted_intercept': float(self.fitted_intercept),
            'r_squared': float(self.r_squared),
            'threshold': float(self.threshold),
            'window': [float(v) for v in self.separations],
            'pass': bool(self.passed),
        }


@dataclass(frozen=True)
class PolynomialSpec:
    """Polynomial in |z_1|..|z_L| with positive coefficients

    Coefficients map exponent tuples of length L to positive reals.
    """
    variables: int
    coefficients: Tuple[Tuple[Tuple[int, ...], float], ...]

    def __post_init__(self):
        if self.variables < 1:
            raise ParameterError("A polynomial needs at least one variable")
        for exponents, coefficient in self.coefficients:
            if len(exponents) != self.variables:
                raise DimensionError(f"Monomial {exponents} does not have {self.variables} exponents")
            if coefficient <= 0:
                raise ParameterError(f"Coefficients must be positive, got {coefficient}")

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.coefficients), default=0)

    def __call__(self, abs_z: np.ndarray) -> np.ndarray:
        """Evaluate on an array whose last axis holds |z_1|..|z_L|"""
        total = np.zeros(abs_z.shape[:-1])
        for exponents, coefficient in self.coefficients:
            term = np.full(abs_z.shape[:-1], coefficient, dtype=float)
            for k, e in enumerate(exponents):
                if e:
                    term = term * abs_z[..., k] ** e
            total = total + term
        return total

    @classmethod
    def constant(cls, variables: int, value: float = 1.0) -> "PolynomialSpec":
        return cls(variables, (((0,) * variables, value),))

    @classmethod
    def power_sum(cls, variables: int, degree: int, coefficient: float = 1.0) -> "PolynomialSpec":
        """Sum of |z_k|^degree over all variables"""
        monomials = []
        for k in range(variables):
            exponents = [0] * variables
            exponents[k] = degree
            monomials.append((tuple(exponents), coefficient))
        return cls(variables, tuple(monomials))


@dataclass
class EnvelopeFit:
    """Outcome of fitting an existence-only constant on a finite grid"""
    claim: str
    fitted_constant: float
    fitted_rate: float
    sample_grid: str
    passed: bool
    samples: Optional[Any] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'claim': self.claim,
            'grid': self.sample_grid,
            'fitted_constant': float(self.fitted_constant),
            'rate': float(self.fitted_rate),
            'pass': bool(self.passed),
        }


@dataclass(frozen=True)
class ResidueTermSpec:
    """One residue channel: L captured poles at positions nu, contour shift r"""
    level: int
    nu: Tuple[int, ...]
    r: float

    def __post_init__(self):
        if not 1 <= len(self.nu) <= self.level - 2:
            raise ParameterError(f"L={len(self.nu)} must lie in [1, {self.level - 2}]")
        if any(a >= b for a, b in zip(self.nu, self.nu[1:])):
            raise ParameterError(f"nu must be strictly increasing, got {self.nu}")
        if self.nu[0] < 1 or self.nu[-1] > self.level:
            raise ParameterError(f"nu entries must lie in 1..{self.level}, got {self.nu}")
        if self.r <= 0:
            raise ParameterError(f"Shift r must be positive, got {self.r}")

    @property
    def L(self) -> int:
        return len(self.nu)


@dataclass
class RunConfig:
    """Complete configuration of one command-line run"""
    a_plus: float = 1.0
    a_minus: float = 1.0
    b_re: float = 0.5
    b_im: float = 0.0
    n: int = 2
    x: List[complex] = field(default_factory=list)
    y: List[float] = field(default_factory=list)
    tolerance: float = 1e-8
    quadrature: Dict[str, Any] = field(default_factory=dict)
    output: Optional[str] = None
    csv: Optional[str] = None
    seed: int = 0
    suite: str = "all"
    representation: str = Representation.DIRECT.value
    function: str = "E"
    shift: Optional[float] = None
    t_values: List[float] = field(default_factory=list)
    claim: Optional[str] = None
    threads: int = 1

    @property
    def params(self) -> Params:
        return Params(self.a_plus, self.a_minus)

    @property
    def b(self) -> complex:
        return complex(self.b_re, self.b_im)


def parse_complex(value: Any) -> complex:
    """Accept numbers, [re, im] pairs and strings such as '0.3-0.1j'"""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"Complex pairs need two entries, got {value}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    return complex(value)


def format_complex(value: complex) -> Any:
    """Inverse of parse_complex; reals stay plain floats"""
    value = complex(value)
    if value.imag == 0.0:
        return value.real
    return [value.real, value.imag]


def params_from_dict(data: Dict[str, Any]) -> Params:
    """Create Params from dictionary"""
    return Params(
        a_plus=float(data['a_plus']),
        a_minus=float(data['a_minus'])
    )


def configuration_from_dict(data: Dict[str, Any]) -> Configuration:
    """Create Configuration from dictionary"""
    return Configuration(
        x=tuple(parse_complex(v) for v in data['x']),
        y=tuple(float(v) for v in data['y'])
    )


def contour_spec_from_dict(data: Dict[str, Any], dims: int = 1) -> ContourSpec:
    """Create ContourSpec from dictionary; offsets default to the real line"""
    return ContourSpec(
        dims=int(data.get('dims', dims)),
        offsets=tuple(data.get('offsets', (0.0,) * int(data.get('dims', dims)))),
        truncation=float(data['truncation']),
        panels=int(data['panels']),
        nodes_per_panel=int(data['nodes_per_panel']),
        breakpoints=tuple(data.get('breakpoints', ()))
    )


RUN_CONFIG_FIELDS = (
    'a_plus', 'a_minus', 'b_re', 'b_im', 'n', 'x', 'y', 'tolerance', 'quadrature',
    'output', 'csv', 'seed', 'suite', 'representation', 'function', 'shift',
    't_values', 'claim', 'threads',
)


def run_config_from_dict(data: Dict[str, Any]) -> RunConfig:
    """Create RunConfig from dictionary, ignoring nothing silently"""
    unknown = set(data) - set(RUN_CONFIG_FIELDS)
    if unknown:
        raise KeyError(f"Unknown config fields: {', '.join(sorted(unknown))}")
    config = RunConfig()
    for name in RUN_CONFIG_FIELDS:
        if name not in data:
            continue
        value = data[name]
        if name == 'x':
            value = [parse_complex(v) for v in value]
        elif name in ('y', 't_values'):
            value = [float(v) for v in value]
        elif name in ('a_plus', 'a_minus', 'b_re', 'b_im', 'tolerance'):
            value = float(value)
        elif name in ('n', 'seed', 'threads'):
            value = int(value)
        elif name == 'shift' and value is not None:
            value = float(value)
        elif name == 'quadrature':
            value = dict(value)
        setattr(config, name, value)
    return config


def run_config_to_dict(config: RunConfig) -> Dict[str, Any]:
    """Serialize RunConfig back to plain JSON types"""
    data = {}
    for name in RUN_CONFIG_FIELDS:
        value = getattr(config, name)
        if name == 'x':
            value = [format_complex(v) for v in value]
        elif name in ('y', 't_values'):
            value = list(value)
        elif name == 'quadrature':
            value = dict(value)
        data[name] = value
    return data
