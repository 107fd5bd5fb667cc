"""Dense Hermitian eigensolver, minors and interlacing checks."""
from wignerlab.spectral.eigh import (
    ConvergenceError,
    EigenDecomposition,
    NotHermitianError,
    check_hermitian,
    eigh,
    eigvalsh,
)
from wignerlab.spectral.minors import (
    EmptyMinorError,
    MinorExtraction,
    cdf_defect,
    counting_function,
    interlacing_check,
    minor,
    reassemble,
)
