"""Hamiltonian Schwinger model on a circle: operator assembly and verification.

Submodules
----------
fock       truncated zero-charge fermionic Fock space and ladder signs
modular    large gauge transformation acting on Fock states
densities  chiral densities, currents, T, boson ladders in fermionic form
coulomb    normal-ordered Coulomb energy and the Bogoliubov dressing
bosonrep   bosonic oscillator representation and the fermion dictionary
gaugegrid  gauge zero mode on a twisted-periodic grid
solver     lowest eigenpairs and Hermitian exponentials
cli        report-producing command-line runners
"""
from .densities import PhysicalConstants
from .fock import BasisCatalog, FockState, ModeWindow, enumerate_basis

__all__ = ["PhysicalConstants", "BasisCatalog", "FockState", "ModeWindow", "enumerate_basis"]
__version__ = "0.1.0"
