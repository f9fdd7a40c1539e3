"""isoweave: a workbench for periodic interlacement designs.

Represents designs on a torus, detects their two-sided symmetry groups,
stripes strands thinly or thickly and verifies perfect colourings,
enumerates the fall-apart catalogue from quarter-turn lattices, rebuilds
the plain-quarter-turn fabric behind a fall-apart design, and builds
perfectly coloured woven cubes.
"""

from .errors import DesignParseError, InvariantError, PreconditionError, WeaveError
from .grid import (
    IDENTITY,
    Isometry,
    TorusDesign,
    about,
    canonical,
    compose,
    double,
    invert,
    is_symmetry,
    order,
    plain_weave,
    reverse_view,
    rot90_about,
    rot180_about,
    translation,
)
from .interlace import Witness, falls_apart, falls_apart_bruteforce, witness_is_valid
from .striping import (
    ColouredFabric,
    Striping,
    StripingClass,
    is_perfect,
    perfect_stripings,
    preserves_blocks,
    striping_classes,
    thin_double_equals_double_thick,
)
from .symmetry import (
    AxisRecord,
    CentreMark,
    Signature,
    SpeciesLabel,
    SymGroup,
    detect_group,
    genus_v_rows,
    group_from_generators,
    has_adjacent_translation,
    is_isonemal,
    level_of,
    signature,
    species,
    species_of,
)
from .catalogue import (
    CatalogueEntry,
    CatalogueRun,
    QtGroupSpec,
    catalogue_k,
    cell_orbits,
    conformance_report,
    enumerate_catalogue,
    orbit_colourings,
    qt_group,
)
from .reconstruct import (
    PartialDesign,
    RebuildResult,
    excess_symmetry_check,
    mirror_fit,
    rebuild_33_4,
    verify_roundtrip,
)
from .cube import CubeNet, StrandPath, build_net, cube_report, is_perfect_cube

__version__ = "0.1.0"
