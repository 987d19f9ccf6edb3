"""Dense complex tensors under the Einstein product, with (weighted) Moore-Penrose inverses."""
from tensor_ginv.errors import TensorGinvError
from tensor_ginv.geninv import (
    CheckReport,
    WeightPair,
    mp_inverse,
    penrose_report,
    weighted_conj_transpose,
    weighted_pinv,
    wmp_inverse,
)
from tensor_ginv.spectral import full_rank_decomposition, hpd_sqrt, tensor_svd
from tensor_ginv.tensor import DenseTensor, EinsteinShape, einstein_product, rsh, rsh_inv

__all__ = [
    "CheckReport",
    "DenseTensor",
    "EinsteinShape",
    "TensorGinvError",
    "WeightPair",
    "einstein_product",
    "full_rank_decomposition",
    "hpd_sqrt",
    "mp_inverse",
    "penrose_report",
    "rsh",
    "rsh_inv",
    "tensor_svd",
    "weighted_conj_transpose",
    "weighted_pinv",
    "wmp_inverse",
]
