"""Pluricomplex Green functions and Lempert-type functions with poles in the polydisc.

Closed-form Green functions live in :mod:`plurigreen.green`; upper bounds for
Lempert functions come from explicit discs and a node search
(:mod:`plurigreen.lempert`); pole collisions are in
:mod:`plurigreen.collisions`.
"""

from ._base import (
    NEG_INF,
    AdmissibilityError,
    CapacityError,
    DegeneracyNotice,
    DomainError,
    ParameterRangeError,
    PlurigreenError,
    PoleAtPointError,
    SearchFailure,
    UnsupportedConfiguration,
)
from .candidates import Condition, DiscCandidate, FeasibilityReport, feasibility
from .collisions import (
    CollisionScenario,
    SweepRow,
    correction_four,
    correction_three,
    counterexample_report,
    scale_disc,
    sweep,
)
from .disc_algebra import AnalyticDisc, Jet, RationalMap, blaschke, jet_at, mobius, mobius_map
from .green import GreenValue, green_four_simple_eps, green_horizontal_bidisc, green_one_pole_polydisc, green_value
from .indicators import PSI_0, PSI_H, PSI_V, Indicator, PoleSystem, s_system, simple_system
from .jets import epsilon_bound, inverse_transport, multpn_construct, schur_jet, transport
from .lempert import (
    LempertOptions,
    coman_upper,
    construct_horizontal,
    construct_nocoman_base,
    construct_one_pole,
    lempert_upper,
    sandwich,
    schwarz_certificates,
    tilde_upper,
)

__version__ = "0.1.0"
