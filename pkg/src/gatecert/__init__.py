"""Single-copy certification of two-qubit gates under depolarizing noise."""
from .canonical import KakDecomposition, ProductPair, find_product_pair, kak_decompose
from .certify import (
    CertificationConfig,
    CertificationProtocol,
    CertificationReport,
    build_protocol,
    estimate_noise,
    exact_locc_guessing,
    run_certification,
)
from .channels import DepolarizingGateChannel
from .discrimination import analytic_guessing, helstrom_numeric, regime
from .gates import NAMED_GATES, load_gate, named_gate

__version__ = "0.1.0"
