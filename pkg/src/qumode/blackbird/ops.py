"""Operation vocabulary of the circuit language.

Each entry records the table an operation belongs to, its parameter signature,
how many modes it acts on and whether it needs the Fock representation.
"""
from dataclasses import dataclass

# parameter types
REAL = "real"
COMPLEX = "complex"
INT = "int"
MATRIX = "matrix"

# operation kinds
PREPARE = "prepare"
GATE = "gate"
MEASURE = "measure"
DECOMPOSITION = "decomposition"
NEW = "new"
DELETE = "delete"

#: sentinel for operations acting on any number of modes
ANY = -1


@dataclass(frozen=True)
class Param:
    name: str
    kind: str
    default: object = None

    @property
    def required(self):
        return self.default is None


@dataclass(frozen=True)
class OpSpec:
    """Signature of one operation.

    Attributes:
        name (str): case-sensitive operation name
        kind (str): prepare, gate, measure, decomposition, new or delete
        table (str): vocabulary table the name belongs to
        params (tuple[Param]): positional parameters in order
        n_modes (int): number of target modes, or :data:`ANY`
        fock_only (bool): needs a Fock-representation backend
    """

    name: str
    kind: str
    table: str
    params: tuple = ()
    n_modes: int = 1
    fock_only: bool = False

    @property
    def min_args(self):
        return sum(p.required for p in self.params)

    @property
    def max_args(self):
        return len(self.params)


def _spec(name, kind, table, params=(), n_modes=1, fock_only=False):
    return OpSpec(name, kind, table, tuple(params), n_modes, fock_only)


def _r(name, default=None):
    return Param(name, REAL, default)


def _c(name, default=None):
    return Param(name, COMPLEX, default)


def _i(name, default=None):
    return Param(name, INT, default)


def _m(name, default=None):
    return Param(name, MATRIX, default)


STATES = "V"
SINGLE_GATES = "VI"
TWO_MODE_GATES = "VII"
DECOMPOSITIONS = "VIII"
MEASUREMENTS = "IX"
REGISTER = "register"

_ALL = [
    # state preparations
    _spec("Vacuum", PREPARE, STATES),
    _spec("Coherent", PREPARE, STATES, [_c("a")]),
    _spec("Squeezed", PREPARE, STATES, [_r("r"), _r("phi", 0.0)]),
    _spec("DisplacedSqueezed", PREPARE, STATES, [_c("a"), _r("r"), _r("phi", 0.0)]),
    _spec("Thermal", PREPARE, STATES, [_r("n")]),
    _spec("Fock", PREPARE, STATES, [_i("n")], fock_only=True),
    _spec("Catstate", PREPARE, STATES, [_c("a"), _r("p", 0.0)], fock_only=True),
    _spec("Ket", PREPARE, STATES, [_m("x")], n_modes=ANY, fock_only=True),
    _spec("DensityMatrix", PREPARE, STATES, [_m("x")], n_modes=ANY, fock_only=True),
    # single-mode gates
    _spec("Dgate", GATE, SINGLE_GATES, [_c("a")]),
    _spec("Xgate", GATE, SINGLE_GATES, [_r("x")]),
    _spec("Zgate", GATE, SINGLE_GATES, [_r("p")]),
    _spec("Sgate", GATE, SINGLE_GATES, [_r("r"), _r("phi", 0.0)]),
    _spec("Rgate", GATE, SINGLE_GATES, [_r("theta")]),
    _spec("Fouriergate", GATE, SINGLE_GATES),
    _spec("Pgate", GATE, SINGLE_GATES, [_r("s")]),
    _spec("Vgate", GATE, SINGLE_GATES, [_r("g")], fock_only=True),
    _spec("Kgate", GATE, SINGLE_GATES, [_r("k")], fock_only=True),
    # two-mode gates
    _spec("BSgate", GATE, TWO_MODE_GATES, [_r("theta"), _r("phi", 0.0)], n_modes=2),
    _spec("S2gate", GATE, TWO_MODE_GATES, [_r("r"), _r("phi", 0.0)], n_modes=2),
    _spec("CXgate", GATE, TWO_MODE_GATES, [_r("s")], n_modes=2),
    _spec("CZgate", GATE, TWO_MODE_GATES, [_r("s")], n_modes=2),
    _spec("CKgate", GATE, TWO_MODE_GATES, [_r("k")], n_modes=2, fock_only=True),
    # multimode decompositions
    _spec("Gaussian", DECOMPOSITION, DECOMPOSITIONS, [_m("cov"), _m("mu", ())], n_modes=ANY),
    _spec("GaussianTransform", DECOMPOSITION, DECOMPOSITIONS, [_m("S")], n_modes=ANY),
    _spec("Interferometer", DECOMPOSITION, DECOMPOSITIONS, [_m("U")], n_modes=ANY),
    # measurements
    _spec("MeasureHomodyne", MEASURE, MEASUREMENTS, [_r("phi", 0.0)]),
    _spec("MeasureHeterodyne", MEASURE, MEASUREMENTS),
    _spec("MeasureFock", MEASURE, MEASUREMENTS, n_modes=ANY, fock_only=True),
    # register management
    _spec("New", NEW, REGISTER),
    _spec("Del", DELETE, REGISTER),
]

VOCABULARY = {spec.name: spec for spec in _ALL}

#: names per table, for completeness checks
TABLES = {}
for _s in _ALL:
    TABLES.setdefault(_s.table, []).append(_s.name)

#: keyword arguments accepted in addition to positional ones
KEYWORDS = ("select", "phi")


def lookup(name):
    """The :class:`OpSpec` for ``name``, or ``None``."""
    return VOCABULARY.get(name)


def gaussian_compatible(name):
    spec = VOCABULARY.get(name)
    return spec is not None and not spec.fock_only
