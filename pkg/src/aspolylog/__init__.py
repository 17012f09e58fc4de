"""Artin-Schreier continuation of Carlitz multiple polylogarithms over F_q(θ)_∞."""

from .context import Config, precision, use_config
from .ffield import GF, FieldTower
from .cinf import CInf
from .tate import TateSeries
from .aschreier import wp, wp_inv
from .special import build_omega, pi_tilde
from .polylog import (Weight, cmpl_series, evaluate_branch, lattice_reduce, monodromy_basis,
                      region_test, series_vector, vec_li_branch)
from .tmodule import build_cn, exp_n, vec_log_n
from .relations import chang_mishiba_check, eulerian_check, orthogonality_check, recognize_rational

__version__ = "0.1.0"
