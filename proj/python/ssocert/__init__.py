"""Second-order sufficiency certificates for composite problems with a
PSD-cone indicator or nuclear-norm term."""

from ._core import (
    DomainError,
    Function,
    InputError,
    ShapeError,
    __version__,
    canonical_element,
    certify,
    frame,
    gamma,
    gamma_bruteforce,
    limiting_elements,
    main,
    moreau_envelope,
    prox,
    prox_conjugate,
    selftest,
)

__all__ = [
    "DomainError",
    "Function",
    "InputError",
    "ShapeError",
    "__version__",
    "canonical_element",
    "certify",
    "frame",
    "gamma",
    "gamma_bruteforce",
    "limiting_elements",
    "main",
    "moreau_envelope",
    "prox",
    "prox_conjugate",
    "selftest",
]
