"""rootforge: exact-arithmetic workbench for root-graded groups.

Subpackages build on each other roughly in this order: `roots` (root
system combinatorics), `chevalley` (integral structure constants),
`algebra` (exact ring backends), `formrings` (coordinatising rings with
forms), `steinberg` (normal forms and coordinatisation), `existence`
(constructive existence checks), `workbench` (CLI and reports).
"""

__version__ = "0.1.0"
