"""Monodromy and Darboux transforms of closed polarised curves in the lightcone model."""

from .curves import Circle, Figure2, Fourier, Rose, Samples, figure1, figure2
from .darboux import (
    TransformCurve,
    backlund_indicator,
    backlund_pcq,
    check_gauge,
    closed_transforms,
    parallel_section,
    transform_pcq,
)
from .eigen4 import eigen4
from .errors import GeometryError
from .integrators import integrate_frame
from .minkowski import inner, null_directions_in_plane, wedge
from .monodromy import (
    MonodromyResult,
    ResonancePoint,
    SpectralSweep,
    find_cover_resonance,
    find_resonance,
    monodromy,
    sweep,
)
from .polarised import PolarisedCurve, VecPoly, linear_cq, verify_pcq
from .space_forms import (
    NullSplitting,
    SpaceForm,
    euclidean_lift,
    gamma,
    halfplane_lift,
    kappa_lift,
    project,
    split,
)

__version__ = "0.1.0"
