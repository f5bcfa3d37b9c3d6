"""Python front end for the levi-scope core library.

Points are 1-D complex numpy arrays of length n.
"""

from ._core import (  # noqa: F401
    Certificate,
    DefiningExpr,
    DomainSpec,
    Error,
    LeviData,
    ParseError,
    SamplingFailure,
    SupportOverflow,
    binary_weak_zq,
    builtin_domain,
    builtin_domain_names,
    builtin_upsilon,
    certify_domain,
    duality_transform,
    levi_form_at,
    load_domain_json,
    mkh_residual,
    mkh_terms,
    parse,
    psi,
    psi_r,
    sample_boundary,
    verify_upsilon,
    weak_zq_lp,
    z_q_status,
)

__version__ = "0.1.0"
