"""Physical constants shared by every module (eV / fs / um unit system)."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Unit-system anchors.

    Attributes
    ----------
    hbar_ev_fs:
        Reduced Planck constant in eV*fs.  Dividing an energy in eV by
        ``hbar_ev_fs`` gives an angular rate in 1/fs.
    c_um_fs:
        Vacuum speed of light in um/fs.  ``R / c_um_fs`` converts a
        propagation distance in um into a delay in fs.
    """

    hbar_ev_fs: float = 0.6582119569
    c_um_fs: float = 0.299792458


#: The single authoritative instance.  Nothing else in the package (or in its
#: tests) re-defines these numbers; everything imports them from here.
CONSTANTS = PhysicalConstants()
