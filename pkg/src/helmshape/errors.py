"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Invalid or degenerate boundary geometry (non-positive radius,
    non-embedded perturbation, unsupported curve for a disk-only routine)."""


class ResonanceError(RuntimeError):
    """Wave number too close to an interior eigenvalue: the boundary
    integral operator for the requested solve is (nearly) singular."""


class EvaluationError(ValueError):
    """Field evaluation requested at a point where the plain trapezoid
    rule cannot deliver accuracy (interior or too close to the boundary)."""


class UnrecoverableModeError(RuntimeError):
    """Reconstruction cannot determine one or more requested Fourier
    modes because every available measurement pair has a coefficient
    below the conditioning floor."""

    def __init__(self, dead_modes, floor):
        self.dead_modes = list(dead_modes)
        self.floor = floor
        super().__init__(
            f"no usable measurement pair for modes {self.dead_modes} "
            f"(|c| floor {floor:g})"
        )
