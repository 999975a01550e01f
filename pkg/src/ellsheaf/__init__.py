"""Exact computations with elliptic sheaves, Drinfeld modules and their uniformizer series over F_q[t]."""
from .drinfeld import XPoint, carlitz, drinfeld_module, t_module, tate_basis, torsion_basis
from .ffield import FieldTower
from .lattice import elliptic_check, lattice_from_uniformizer, scattering_det, stabilizer_ring
from .uniformizer import baker, build_uniformizer, carlitz_uniformizer, gl_action, moore_formula

__version__ = "0.1.0"
