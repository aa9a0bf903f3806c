"""Bundled example systems, given as DSL text.

These are the small networks the test-suite and the demos revolve around;
each highlights a different corner of the balance landscape (see the demo
scripts for walkthroughs).
"""

from __future__ import annotations

from .model import MassActionSystem
from .parser import parse_network

# Two reversible pairs, A+B <-> 2C and A <-> B.  With unit constants it is
# reaction balanced; it is reaction balanced for every constant choice.
INTRO_UNIT = "A + B <-> 2C : 1, 1\nA <-> B : 1, 1"
INTRO_GENERIC = "A + B <-> 2C : 1, 2\nA <-> B : 3, 4"

# Fully reversible triangle on 2A, A+B, 2B.  At (1,1): reaction vector and
# cycle balanced but neither complex nor reaction balanced.
TRIANGLE = (
    "2A <-> A + B : 1, 2\n"
    "A + B <-> 2B : 2, 1\n"
    "2A <-> 2B : 1, 1"
)

# Reversible square on 3A, 2A+B, 3B, A+2B: constants 2 clockwise and 1
# counterclockwise.  Complex and reaction vector balanced at (1,1), but not
# cycle balanced (products 16 vs 1), hence not reaction balanced.
SQUARE = (
    "3A <-> 2A + B : 2, 1\n"
    "2A + B <-> 3B : 2, 1\n"
    "3B <-> A + 2B : 2, 1\n"
    "A + 2B <-> 3A : 2, 1"
)

# One species, two reversible pairs; three distinct positive reaction vector
# balanced equilibria at 1, 2 and 3.
RVB_THREE_ROOTS = "0 <-> A : 6, 11\n2A <-> 3A : 6, 1"

# Irreversible two-reaction system with a line of reaction vector balanced
# equilibria (1, l-1); no positive equilibrium when the total is <= 1.
ABSOLUTE_CONCENTRATION = "B -> A : 1\nA + B -> 2B : 1"

# Birth-death chain whose stationary distribution is reaction vector
# balanced (as every birth-death chain's is) but not reaction balanced.
BIRTH_DEATH = "0 <-> A : 0.5, 1\n2A <-> 3A : 1, 3"

# One species, five complexes, jumps of size one and two.  The chain's
# stationary distribution is reaction vector balanced, yet the deterministic
# side has no reaction vector balanced equilibrium.
STOCH_RVB_ONLY = (
    "0 <-> A : 1, 1\n"
    "0 <-> 2A : 2, 3\n"
    "A <-> 2A : 1, 2\n"
    "A <-> 3A : 4, 12\n"
    "2A <-> 4A : 1, 4"
)

# Two-species variant of the previous network: the +-2 jumps through B make
# the chain positive recurrent only on the slice x_B = 1.
STOCH_RVB_TWO_SPECIES = (
    "0 <-> A : 1, 1\n"
    "0 -> 2A : 2\n"
    "2A -> 0 : 3\n"
    "A -> 2A : 1\n"
    "2A -> A : 2\n"
    "A -> 3A : 4\n"
    "3A -> A : 12\n"
    "2A -> 4A : 1\n"
    "4A + B -> 2A + B : 4"
)

# Open birth-death with a catalytic production channel; a reaction vector
# balanced stationary measure exists on x_B = 1 but is not normalizable on
# the components with more catalyst.
SEMI_OPEN = "0 <-> A : 1, 1\nA + B -> 2A + B : 0.5"

# Two triangles, the second shifted by a catalyst C.  Complex balanced for
# both regimes; the stationary distribution on x_C = 1 is reaction vector
# balanced while the one on x_C = 2 is not, and none is reaction balanced.
SIX_COMPLEX = (
    "A <-> 0 : 2, 1\n"
    "0 <-> B : 2, 1\n"
    "B <-> A : 2, 1\n"
    "A + C <-> B + C : 2, 1\n"
    "A + C <-> C : 1, 2\n"
    "C <-> B + C : 1, 2"
)

# Reversible monomolecular cycle with unit constants; reaction balanced.
MONO_TRIANGLE = "A <-> B : 1, 1\nB <-> C : 1, 1\nC <-> A : 1, 1"

SYSTEMS: dict[str, str] = {
    "intro_unit": INTRO_UNIT,
    "intro_generic": INTRO_GENERIC,
    "triangle": TRIANGLE,
    "square": SQUARE,
    "rvb_three_roots": RVB_THREE_ROOTS,
    "absolute_concentration": ABSOLUTE_CONCENTRATION,
    "birth_death": BIRTH_DEATH,
    "stoch_rvb_only": STOCH_RVB_ONLY,
    "stoch_rvb_two_species": STOCH_RVB_TWO_SPECIES,
    "semi_open": SEMI_OPEN,
    "six_complex": SIX_COMPLEX,
    "mono_triangle": MONO_TRIANGLE,
}


def load(name: str) -> MassActionSystem:
    """Parse one of the bundled systems by name."""
    return parse_network(SYSTEMS[name])
