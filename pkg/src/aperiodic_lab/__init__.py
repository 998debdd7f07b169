"""Exact patch statistics for finite windows of Delone sets."""
from .certificates import CertificateReport, certify
from .config import RunConfig
from .exact import QNum, audited
from .generators import (gen_block_substitution_2d, gen_fibonacci_cut_project, gen_fibonacci_integer, gen_lattice,
                         gen_periodic_superlattice)
from .patches import complexity_profile, count_patches, count_patches_bruteforce
from .pointset import PointSet, dump_pointset, load_pointset
from .repetitivity import repetitivity_at, repetitivity_profile

__version__ = "0.1.0"

__all__ = [
    "QNum", "audited", "PointSet", "load_pointset", "dump_pointset", "RunConfig",
    "gen_lattice", "gen_fibonacci_integer", "gen_fibonacci_cut_project", "gen_block_substitution_2d",
    "gen_periodic_superlattice", "count_patches", "count_patches_bruteforce", "complexity_profile",
    "repetitivity_at", "repetitivity_profile", "certify", "CertificateReport",
]
