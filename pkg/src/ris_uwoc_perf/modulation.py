"""Binary modulation family ``Γ(p, qγ) / (2Γ(p))`` used by the bit-error-rate metrics."""
from dataclasses import dataclass

from scipy import special


@dataclass(frozen=True)
class ModulationParams:
    """Parameters ``(p, q)`` of the conditional bit-error rate ``Γ(p, qγ) / (2Γ(p))``."""

    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise ValueError(f"modulation parameters must be positive, got p={self.p}, q={self.q}")

    def conditional_ber(self, snr):
        """Bit-error rate at instantaneous SNR ``snr`` (scalar or array)."""
        return 0.5 * special.gammaincc(self.p, self.q * snr)


BPSK = ModulationParams(0.5, 1.0)
