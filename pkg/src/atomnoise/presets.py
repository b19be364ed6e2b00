"""Bundled scan presets reproducing the standard benchmark spectra.

Each preset is a list of (label, config dict) members; a member's config is
a plain JSON-compatible dict accepted by ``validate_config``.  Presets with
several members (one curve family per file) produce one CSV per member.
"""

from __future__ import annotations

from copy import deepcopy

__all__ = ["PRESETS", "preset_configs"]


def _two_level(omega_r: float, C: float, delta: float = 0.0) -> dict:
    return {
        "atom": {"Fg": 0, "Fe": 1, "gamma": 0.01},
        "drive": {"delta": delta, "omega_r": omega_r},
        "medium": {"C": C},
    }


PRESETS: dict[str, list[tuple[str, dict]]] = {
    # Resonant two-level transmission, thin medium: amplitude squeezing at
    # low frequency for weak drive, gone above saturation.
    "fig2": [
        (
            f"om{str(om).replace('.', 'p')}",
            {
                **_two_level(om, 1.0),
                "grid": {"omega_min": 0.0, "omega_max": 3.0, "count": 301, "spacing": "linear"},
            },
        )
        for om in (0.3, 0.5, 1.0, 2.0)
    ],
    # Detuned two-level system vs optical thickness: phase squeezing around
    # the generalized Rabi frequency, broadening with C.
    "fig3": [
        (
            f"C{int(c)}",
            {
                **_two_level(10.0, c, delta=10.0),
                "grid": {"omega_min": 0.02, "omega_max": 20.0, "count": 600, "spacing": "linear"},
            },
        )
        for c in (1.0, 10.0, 100.0)
    ],
    # Same as the thick fig3 case, with the semiclassical/quantum split.
    "fig4": [
        (
            "C100",
            {
                **_two_level(10.0, 100.0, delta=10.0),
                "grid": {"omega_min": 0.02, "omega_max": 20.0, "count": 600, "spacing": "linear"},
                "decompose": True,
            },
        )
    ],
    # Open system (Fg=1 -> Fe=0): low-frequency excess noise, spontaneous
    # emission noise in the orthogonal polarization.
    "fig5": [
        (
            "C10",
            {
                "atom": {"Fg": 1, "Fe": 0, "gamma": 0.01},
                "drive": {"delta": 10.0, "omega_r": 10.0},
                "medium": {"C": 10.0},
                "grid": {"omega_min": 1e-3, "omega_max": 30.0, "count": 400, "spacing": "log"},
            },
        )
    ],
    # Resonant Fg=1/2 -> Fe=1/2: orthogonal amplitude noise mirrors the
    # driven phase noise.
    "fig6": [
        (
            "C10",
            {
                "atom": {"Fg": 0.5, "Fe": 0.5, "gamma": 0.01},
                "drive": {"delta": 0.0, "omega_r": 10.0},
                "medium": {"C": 10.0},
                "grid": {"omega_min": 0.02, "omega_max": 20.0, "count": 500, "spacing": "linear"},
            },
        )
    ],
    # Detuned Fg=1/2 -> Fe=1/2: polarization self-rotation squeezing of the
    # vacuum mode; low-frequency symmetry breaking.
    "fig7": [
        (
            "C10",
            {
                "atom": {"Fg": 0.5, "Fe": 0.5, "gamma": 0.01},
                "drive": {"delta": 10.0, "omega_r": 10.0},
                "medium": {"C": 10.0},
                "grid": {"omega_min": 1e-2, "omega_max": 30.0, "count": 500, "spacing": "log"},
            },
        )
    ],
    # Fg=1 -> Fe=2 at high intensity: atoms at rest, and the same system
    # through a thermal vapor (driving resonant with zero-velocity atoms).
    "fig8": [
        (
            "rest",
            {
                "atom": {"Fg": 1, "Fe": 2, "gamma": 0.01},
                "drive": {"delta": 10.0, "omega_r": 40.0},
                "medium": {"C": 100.0},
                "grid": {"omega_min": 1e-2, "omega_max": 60.0, "count": 500, "spacing": "log"},
            },
        ),
        (
            "doppler",
            {
                "atom": {"Fg": 1, "Fe": 2, "gamma": 0.01},
                "drive": {"delta": 0.0, "omega_r": 40.0},
                "medium": {"C": 100.0},
                "doppler": {"width_fwhm": 90.0},
                "grid": {"omega_min": 0.02, "omega_max": 60.0, "count": 120, "spacing": "log"},
            },
        ),
    ],
}


def preset_configs(name: str) -> list[tuple[str, dict]]:
    """Deep copies of a preset's member configs (safe to mutate)."""
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise KeyError(f"unknown preset {name!r}; available: {known}")
    return [(label, deepcopy(cfg)) for label, cfg in PRESETS[name]]
