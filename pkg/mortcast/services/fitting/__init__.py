"""Mortality model fitters."""
from mortcast.services.fitting.apc import fit_apc
from mortcast.services.fitting.factory import fit
from mortcast.services.fitting.lc_gaussian import fit_lc_gaussian
from mortcast.services.fitting.lc_poisson import fit_lc_poisson
from mortcast.services.fitting.plat import fit_plat

__all__ = ["fit", "fit_apc", "fit_lc_gaussian", "fit_lc_poisson", "fit_plat"]
